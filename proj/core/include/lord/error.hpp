#pragma once

#include <stdexcept>
#include <string>

namespace lord {

// Base type for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input document (CSV row, manifest, model file).
class ParseError : public Error {
public:
    using Error::Error;
};

// Invalid split or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Precondition violation on an operation argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Degenerate sample set or solver failure.
class NumericError : public Error {
public:
    using Error::Error;
};

// Requested training strategy is not implemented for the model family.
class UnsupportedStrategy : public Error {
public:
    using Error::Error;
};

}  // namespace lord
