#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pms2l {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input whose values violate a data invariant (non-finite, zero norm, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// A stratified split cannot be drawn.
class SplitError : public DataError {
public:
    using DataError::DataError;
};

/// Invalid parameter combination (bad G, kappa >= K, mismatched dimensions, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Invalid argument to a pure computation (empty set, delta outside (0,1), ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Operation not available for this partition kind (e.g. assigning without centers).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace pms2l
