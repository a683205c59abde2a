#pragma once

#include <stdexcept>
#include <string>

namespace curator {

// User-facing configuration problem: bad or missing keys, bad values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset or output file problem: missing files, size mismatch, NaN.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant violated (e.g. parallel output mismatch). Maps to exit 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace curator
