#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace platecharge {

/// Precondition violation on a model input (non-finite values, bad geometry).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The design matrix carries no information about one or more parameters.
class DegenerateDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver hit its iteration cap. Carries the best parameters seen.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, std::vector<double> best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const std::vector<double>& best_parameters() const noexcept { return best_; }

private:
    std::vector<double> best_;
};

/// Malformed input data (CSV rows, mismatched record sets).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t row = 0)
        : std::runtime_error(what), row_(row) {}
    /// 1-based line number in the source file, 0 when not tied to a row.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Configuration file could not be parsed or failed validation.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace platecharge
