#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synact {

// Base of every error raised by the library. Subclasses name the failure
// category; callers that only need a message can catch synact::Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text record. line() is 1-based; 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Syntactically valid input whose contents are inconsistent
// (index out of range, count mismatch, accessor outside its buffer).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Wrong magic, wrong version or truncated binary payload.
class FormatError : public Error {
public:
    using Error::Error;
};

class UnsupportedFeatureError : public Error {
public:
    using Error::Error;
};

// A value outside its allowed domain (unknown label, negative weight, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Violated precondition of an operation.
class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class OptimizationError : public Error {
public:
    using Error::Error;
};

}  // namespace synact
