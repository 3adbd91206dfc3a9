#pragma once

#include <stdexcept>

namespace scnet {

// File system problems (missing inputs, unwritable outputs).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scnet
