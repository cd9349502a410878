#pragma once

#include <stdexcept>
#include <string>

namespace lsland {

// Base of every error the library throws. The CLI maps ArgumentError to exit
// code 2 and every other Error to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters supplied by the caller (sigma <= 0, budget < 1, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Node id or index outside its valid range.
class RangeError : public Error {
public:
    using Error::Error;
};

// A requested structure does not fit the node-id type.
class SizeError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

class FormatVersionError : public DataError {
public:
    using DataError::DataError;
};

// Raised when an operation needs a frozen view but the noise is redrawn.
class NotFrozenError : public Error {
public:
    using Error::Error;
};

}  // namespace lsland
