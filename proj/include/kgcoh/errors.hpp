#pragma once

#include <stdexcept>
#include <string>

namespace kgcoh {

// Thrown when a quadrature or series fails to meet its tolerance.
// The best available estimate is kept so callers can still report it.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_(best_estimate), error_(error_estimate) {}

  double best_estimate() const { return best_; }
  double error_estimate() const { return error_; }

 private:
  double best_;
  double error_;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kgcoh
