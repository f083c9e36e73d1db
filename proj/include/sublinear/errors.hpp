#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sublinear {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the input data does not hold (unbalanced blocks, n <= p, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A matrix that must be positive definite is singular or numerically so.
class SingularMatrixError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Block sizes differ where a balanced partition is required.
class UnbalancedPartitionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// A value or configuration is outside its documented domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace sublinear
