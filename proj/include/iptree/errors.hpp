#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iptree {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, bad label, non-normalized mass, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configured size cap (table cells, enumeration count) would be exceeded.
class ResourceLimit : public Error {
public:
    ResourceLimit(const std::string& what, std::size_t requested, std::size_t cap)
        : Error(what + ": requested " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
          requested_(requested),
          cap_(cap) {}

    std::size_t requested() const noexcept { return requested_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

/// Syntax error in the gamble expression language, with a 1-based position.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structural error in a JSON document; `path()` is a JSON pointer to the offending node.
class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& message)
        : Error((path.empty() ? std::string("/") : path) + ": " + message),
          path_(path.empty() ? "/" : path),
          message_(message) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string path_;
    std::string message_;
};

}  // namespace iptree
