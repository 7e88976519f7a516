#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xla {

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DivisionByZero : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input text could not be parsed; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// The tuner could not produce a result (too few points, singular fit).
class TunerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace xla
