#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occupancy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV / model / sidecar content. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
    using Error::Error;
};

class OrderingError : public Error {
    using Error::Error;
};

/// A value outside its domain (e.g. occupancy not in {0,1}).
class DomainError : public Error {
    using Error::Error;
};

class ConfigError : public Error {
    using Error::Error;
};

class ShapeError : public Error {
    using Error::Error;
};

class IndexError : public Error {
    using Error::Error;
};

/// Non-finite value encountered in numeric code.
class NumericError : public Error {
    using Error::Error;
};

class IoError : public Error {
    using Error::Error;
};

}  // namespace occupancy
