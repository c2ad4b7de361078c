#pragma once

#include <stdexcept>
#include <string>

namespace nids {

// Common base so callers (notably the CLI) can catch everything from this
// library in one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible matrix/vector dimensions.
struct ShapeError : Error {
    using Error::Error;
};

// A value is outside the mathematical domain of the operation
// (probability outside [0,1], empty batch, non-positive k, ...).
struct DomainError : Error {
    using Error::Error;
};

// A request exceeds a hard size guard (e.g. exact enumeration limits).
struct CapacityError : Error {
    using Error::Error;
};

// Invalid or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed or unusable input data.
struct DataError : Error {
    using Error::Error;
};

// Operation called in the wrong order (apply before fit, predict before train).
struct StateError : Error {
    using Error::Error;
};

// Filesystem-level failure.
struct IoError : Error {
    using Error::Error;
};

// Persisted file is unreadable: bad magic, version or checksum.
struct FormatError : Error {
    using Error::Error;
};

} // namespace nids
