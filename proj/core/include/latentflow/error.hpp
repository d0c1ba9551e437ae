#pragma once

#include <stdexcept>
#include <string>

namespace latentflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or inconsistent.
class DataError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A numeric routine failed to produce a usable result.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace latentflow
