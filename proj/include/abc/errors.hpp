#pragma once

#include <stdexcept>
#include <string>

namespace abc {

// Invalid configuration or dimension mismatch supplied by the caller.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: singular system, non-convergence, collapsed subspace.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An adaptive recursion left its stable region (non-finite state or
// runaway feedback). Carries the block/epoch context in the message.
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace abc
