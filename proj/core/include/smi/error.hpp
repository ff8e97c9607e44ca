#pragma once

#include <stdexcept>
#include <string>

namespace smi {

// Base class for every error the pipeline raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing input data (CLI exit code 1).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, missing files the configuration names, or a
// request for a level that has no geometry loaded (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace smi
