#pragma once

#include <stdexcept>
#include <string>

namespace critlab {

// Thrown when a structural invariant of a process or trace fails; the CLI
// maps this to exit code 2 (parameter errors use std::invalid_argument).
class invariant_error : public std::runtime_error {
 public:
  explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace critlab
