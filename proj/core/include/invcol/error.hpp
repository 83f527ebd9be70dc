#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invcol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An argument outside the domain of an operation (empty vector, unknown node, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Configuration or artifact that fails validation before any work is done.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace invcol
