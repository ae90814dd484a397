#pragma once

namespace epf {

inline constexpr const char* kVersion = "1.0.0";

} // namespace epf
