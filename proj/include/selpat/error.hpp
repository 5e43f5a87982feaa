#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selpat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Arguments or data violate a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Materialization would exceed the configured pattern cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// The observed response violates its own selection event.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Truncation bounds with L >= U.
class InvalidIntervalError : public Error {
public:
    using Error::Error;
};

/// A search or experiment exceeded its wall-clock budget.
class TimeoutError : public Error {
public:
    using Error::Error;
};

} // namespace selpat
