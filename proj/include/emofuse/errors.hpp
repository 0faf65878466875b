#pragma once

#include <stdexcept>
#include <string>

namespace emofuse {

/// Base error. `exit_code()` is the process exit status the CLI maps a
/// failure to: 2 = input/format error, 3 = data-alignment error,
/// 4 = internal invariant violation.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const { return 2; }
};

/// Malformed container or document (WAV, PNM, JSON, CSV, model file).
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Well-formed container but a codec/layout this library does not handle.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// Invalid argument value (bad range, bad enum, bad config field).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Dimension or cardinality mismatch in tensors, landmarks, model files.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input too short or empty for the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Geometry collapsed (e.g. coincident eye centers before scaling).
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// Keys or windows that must correspond across inputs do not.
class AlignmentError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

/// A postcondition this library promises was violated. Always a bug.
class InternalError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

}  // namespace emofuse
