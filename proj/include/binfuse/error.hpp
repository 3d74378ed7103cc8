#pragma once

#include <stdexcept>
#include <string>

namespace binfuse {

/// Root of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unsupported parameter such as a fingerprint width other than 8 or 16.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Peeling did not succeed within the allowed number of seeds.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, unsigned attempts)
      : Error(what), attempts_(attempts) {}
  unsigned attempts() const noexcept { return attempts_; }

 private:
  unsigned attempts_;
};

/// The input set contained the same key more than once.
class DuplicateKeyError : public ConstructionError {
 public:
  using ConstructionError::ConstructionError;
};

/// A ratio was requested for an empty set.
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

// Deserialization failures.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace binfuse
