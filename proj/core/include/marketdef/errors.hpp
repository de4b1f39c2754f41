#pragma once
// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// SchemaError -> 2, data/domain errors -> 3, ConvergenceError -> 4.

#include <stdexcept>
#include <string>

namespace marketdef {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or input schema (missing column, bad config key).
class SchemaError : public Error {
public:
    using Error::Error;
};

// A cell or token that could not be parsed; message carries row/column context.
class ParseError : public Error {
public:
    using Error::Error;
};

// Valid syntax, invalid value: precondition or domain violations.
class DomainError : public Error {
public:
    using Error::Error;
};

// Shape mismatch between operands.
class DimensionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Iterative fit failed to converge (e.g. separable logit data).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace marketdef
