#pragma once

#include <stdexcept>
#include <string>

namespace wia {

/// An iterative solver stopped at its iteration cap.
class non_convergence_error : public std::runtime_error {
 public:
  non_convergence_error(const std::string& what, long iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

class singular_system_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The greedy action set of a solved MDP is not of threshold form.
class structure_violation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class bracket_failure_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wia
