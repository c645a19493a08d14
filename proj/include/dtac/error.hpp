#pragma once

#include <stdexcept>

namespace dtac {

/// Raised for invalid inputs, failed subproblem solves and divergence.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtac
