#pragma once

#include <stdexcept>
#include <string>

namespace cal {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or band counts that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters: bad weights, out-of-range thresholds, unknown config keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite losses or gradients reaching a stateful component.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing files (PGM, manifest, checkpoint, CSV).
class IoError : public Error {
public:
    using Error::Error;
};

/// Metrics requested over zero pixels.
class EmptyEvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace cal
