#pragma once

#include <span>
#include <vector>

#include "wia/model.hpp"

namespace wia {

/// Solution of the single-BS average-cost dynamic programming equation
///   V(x) = Cx - eta + min{ E_accept[V(next)], lam + E_reject[V(next)] }
/// under the normalisation V(0) = 0.
struct ValueSolution {
  std::vector<double> v;
  double eta = 0.0;
  double lam = 0.0;
  double residual = 0.0;  // sup-norm DPE residual
  long iterations = 0;
};

/// Accept an arrival iff the current state x <= t. t = -1 rejects everywhere.
struct ThresholdPolicy {
  int t = -1;

  bool accepts(int x) const { return x <= t; }
  bool operator==(const ThresholdPolicy&) const = default;
};

struct StationaryDistribution {
  std::vector<double> nu;
};

struct ThresholdEvaluation {
  std::vector<double> v;
  double eta = 0.0;
};

struct RviOptions {
  double tol = 1e-9;
  long max_iter = 1'000'000;
  // Optional starting point (size n_max + 1). Does not change the fixed point.
  std::span<const double> warm_start = {};
};

/// Relative value iteration with a 1/2 self-loop aperiodicity transform. Stops
/// once span(TV - V) < tol, or below double rounding level for huge costs.
/// Admission is infeasible at x = n_max: a full BS always rejects (and pays
/// the tax), matching the simulator, which never assigns to a full BS.
/// Throws non_convergence_error after opts.max_iter sweeps.
ValueSolution rvi_solve(const BsParams& params, int m, double p, double lam, int n_max,
                        const RviOptions& opts = {});

/// E_accept[V] - E_reject[V] - lam at state x: the accept expression of the
/// DPE minus the reject expression. Negative means accepting is strictly better.
double action_gap(const ValueSolution& sol, const KernelPair& kernels, int x);

/// Threshold read off the DPE argmin. Ties (|gap| <= 1e-9) go to accept.
/// Throws structure_violation_error if the accept set is not {0..t}.
ThresholdPolicy greedy_policy(const ValueSolution& sol, const KernelPair& kernels);

/// Exact average cost and relative values of a fixed threshold policy, from the
/// (n_max + 2)-unknown linear system with V(0) = 0. Uses the kernels of
/// transition_kernels() verbatim, so t = n_max accepts at n_max with the
/// over-capacity arrival redirected to n_max.
ThresholdEvaluation evaluate_threshold(const BsParams& params, int m, double p, double lam,
                                       ThresholdPolicy policy, int n_max);

StationaryDistribution stationary_distribution(const BsParams& params, int m, double p,
                                               ThresholdPolicy policy, int n_max);

/// f(lam, t) = C sum_x x nu_t(x) + lam sum_{x > t} nu_t(x).
double average_cost_f(const BsParams& params, int m, double p, double lam, ThresholdPolicy policy,
                      int n_max);

/// h(x) = E[V(x - D + arrival)] - E[V(x - D)] for 0 <= x < n_max.
double advantage_h(const ValueSolution& sol, const BsParams& params, int m, double p, int x);

/// Linear system of a threshold policy, factorised once. The solution is affine
/// in the tax, so after construction solve(lam) is O(n_max).
class ThresholdSystem {
 public:
  ThresholdSystem(const KernelPair& kernels, double c, ThresholdPolicy policy);

  ThresholdEvaluation solve(double lam) const;
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<double> base_;  // solution at lam = 0: V(0..n_max), eta
  std::vector<double> tax_;   // derivative of the solution in lam
};

}  // namespace wia
