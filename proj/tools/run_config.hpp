#pragma once

#include "epforest/calendar.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epf::cli {

/// Everything a batch command needs. Defaults < command-line flags < config
/// file: a `--config` file, when given, overrides flags key by key.
struct RunConfig {
    std::filesystem::path input;    // raw daily CSV
    std::filesystem::path scenario; // scenario config; "default" = built-in
    std::filesystem::path feature_spec;
    std::filesystem::path out_dir = ".";

    std::string target = "base";
    std::optional<Date> from;
    std::optional<Date> to;
    std::vector<std::pair<Date, Date>> ranges; // importance subsamples

    std::vector<int> min_node_sizes{5, 10, 20, 30, 40};
    std::vector<int> tree_counts{100, 1000};
    int mtry = 0; // 0 -> p/3
    std::uint64_t seed = 1;
    int threads = 1;
    std::string fill = "forward"; // forward | linear
    int min_rows = 100;

    int grid_points = 25; // pdp axis resolution
    std::string feature_a = "permit";
    std::string feature_b = "natgas";

    /// Throws ConfigError on contradictions (from > to, empty grids, ...).
    void validate() const;

    /// Applies `key = value` lines from `path` on top of this config.
    void apply_config_file(const std::filesystem::path& path);

    /// Canonical key=value dump; the config hash is computed from this.
    std::string canonical_string(const std::string& command) const;
};

/// FNV-1a over the canonical config string; stable across runs.
std::uint64_t config_hash(const RunConfig& config, const std::string& command);

/// Standard header-comment lines for every output file.
std::vector<std::string> output_header(const RunConfig& config, const std::string& command);

} // namespace epf::cli
