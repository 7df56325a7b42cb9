#pragma once

#include <stdexcept>
#include <string>

namespace gppsm {

/// Input data violates a documented precondition or type invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A text input (MGF, TSV, model file) could not be parsed.
/// Carries the 1-based line number when one is known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace gppsm
