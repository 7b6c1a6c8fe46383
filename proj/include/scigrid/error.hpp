#pragma once

#include <stdexcept>

namespace scigrid {

/// Bad configuration: invalid pattern, invalid scope, malformed config file.
/// Aborts a run with exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output. Aborts a run with exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scigrid
