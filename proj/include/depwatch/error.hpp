#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace depwatch {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Input is well-formed but violates a contract (missing reference, bad range, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    VersionError(const std::string& what, long long found) : Error(what), found_(found) {}
    long long found() const noexcept { return found_; }

private:
    long long found_;
};

/// A queried key is not part of the structure (e.g. a node absent from a graph).
class LookupError : public Error {
public:
    using Error::Error;
};

/// A requested resource does not exist at its source (repository, store entry, id).
class NotFoundError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

/// The remote side asked us to back off. Retrying after `retry_after()` may succeed.
class RateLimitedError : public Error {
public:
    RateLimitedError(const std::string& what, std::chrono::seconds retry_after)
        : Error(what), retry_after_(retry_after) {}
    std::chrono::seconds retry_after() const noexcept { return retry_after_; }

private:
    std::chrono::seconds retry_after_;
};

} // namespace depwatch
