#pragma once

#include <stdexcept>
#include <string>

namespace seqlab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tensor shape mismatch; message names both shapes.
struct ShapeError : Error {
    using Error::Error;
};

/// Math domain violation (log of non-positive value, invalid probability, ...).
struct DomainError : Error {
    using Error::Error;
};

/// A NaN or Inf surfaced in a computation. Fails fast with the op name.
struct NumericError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// Malformed input file; message carries the line number where known.
struct ParseError : Error {
    using Error::Error;
};

/// Invalid or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Operation called in the wrong state (e.g. RL fine-tune without a pretrain checkpoint).
struct StateError : Error {
    using Error::Error;
};

}  // namespace seqlab
