#pragma once

#include <stdexcept>
#include <string>

namespace eitfuse {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad argument, wrong shape).
class InputError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent on-disk data.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace eitfuse
