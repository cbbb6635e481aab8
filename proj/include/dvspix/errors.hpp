#pragma once

#include <stdexcept>

namespace dvspix {

// Bad command line or configuration (CLI exit 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or missing input data (CLI exit 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A verification stage failed its tolerance (CLI exit 3).
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dvspix
