#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arsar {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A NaN/Inf appeared, or a linear system was singular.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Radar constants that violate a physical invariant.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Misuse of a stateful object (e.g. replaying a consumed tape).
class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed binary file. Carries the byte offset where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace arsar
