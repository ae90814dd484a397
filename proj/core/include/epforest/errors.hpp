#pragma once

#include <stdexcept>
#include <string>

namespace epf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration: bad flags, malformed config files, invalid
/// scenario or hyperparameter values. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bad or insufficient input data: parse failures, schema violations,
/// duplicate dates, missing variables, too few rows. CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failures: domain errors, rank deficiency, non-finite
/// inputs, undefined averages. CLI exit code 4.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace epf
