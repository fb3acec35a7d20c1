#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groundheat {

/// Precondition or argument outside the admissible domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The forward solver produced a non-finite value at node j, time level n.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(std::size_t node, std::size_t level)
        : std::runtime_error("non-finite temperature at node " + std::to_string(node) +
                             ", time level " + std::to_string(level)),
          node_(node), level_(level) {}

    std::size_t node() const noexcept { return node_; }
    std::size_t level() const noexcept { return level_; }

private:
    std::size_t node_;
    std::size_t level_;
};

/// Malformed input file. `row` is the 1-based data row (0 for the header).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t row, const std::string& what)
        : std::runtime_error(source + ": row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Invalid or missing configuration entry; `key()` is "section.key".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Statistic undefined for the given input (e.g. zero-variance chain).
class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace groundheat
