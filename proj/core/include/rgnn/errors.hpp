#pragma once

#include <stdexcept>
#include <string>

namespace rgnn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration, schema or argument. The CLI maps it to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between tensors that would otherwise broadcast silently.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Two electrodes share coordinates, so distances are not strictly positive.
class DegenerateLayoutError : public Error {
 public:
  using Error::Error;
};

/// A row of |A| sums to zero and the propagator cannot be normalized.
class IsolatedNodeError : public Error {
 public:
  using Error::Error;
};

/// Dataset bundle whose manifest and blobs disagree.
class CorruptBundleError : public Error {
 public:
  using Error::Error;
};

class CorruptCheckpointError : public Error {
 public:
  using Error::Error;
};

/// Loss, gradient or update that left the finite range.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgnn
