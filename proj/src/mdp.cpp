#include "wia/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wia/dense_lu.hpp"
#include "wia/errors.hpp"

namespace wia {

namespace {

constexpr double kRoundingFloor = 1e-13;

constexpr double kSelfLoop = 0.5;
constexpr double kTieTol = 1e-9;

void check_threshold(ThresholdPolicy policy, int n_max) {
  if (policy.t < -1 || policy.t > n_max)
    throw std::invalid_argument("threshold must lie in [-1, n_max], got " + std::to_string(policy.t));
}

const TransitionKernel& kernel_for(const KernelPair& k, ThresholdPolicy policy, int x) {
  return policy.accepts(x) ? k.accept : k.reject;
}

}  // namespace

ValueSolution rvi_solve(const BsParams& params, int m, double p, double lam, int n_max,
                        const RviOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("rvi_solve: tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("rvi_solve: max_iter must be >= 1");
  const KernelPair k = transition_kernels(params, m, p, n_max);
  const std::size_t n = static_cast<std::size_t>(n_max) + 1;

  std::vector<double> v(n, 0.0);
  if (!opts.warm_start.empty()) {
    if (opts.warm_start.size() != n) throw std::invalid_argument("rvi_solve: warm start has wrong size");
    v.assign(opts.warm_start.begin(), opts.warm_start.end());
    const double v0 = v[0];
    for (double& e : v) e -= v0;
  }
  std::vector<double> diff(n);

  // Spans below the rounding noise of the iterate are unreachable (huge taxes).
  const double cost_scale = std::max(params.c * n_max, std::abs(lam));
  double span = std::numeric_limits<double>::infinity();
  for (long it = 1; it <= opts.max_iter; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double magnitude = cost_scale;
    for (int x = 0; x <= n_max; ++x) {
      magnitude = std::max(magnitude, std::abs(v[static_cast<std::size_t>(x)]));
      const double hold = params.c * x;
      double best = hold + lam + k.reject.expect(x, v);
      if (x < n_max) best = std::min(best, hold + k.accept.expect(x, v));
      const double d = best - v[static_cast<std::size_t>(x)];
      diff[static_cast<std::size_t>(x)] = d;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;
    if (span < std::max(opts.tol, kRoundingFloor * magnitude)) {
      ValueSolution sol;
      sol.v = std::move(v);
      sol.eta = 0.5 * (hi + lo);
      sol.lam = lam;
      sol.residual = 0.5 * span;
      sol.iterations = it;
      return sol;
    }
    // v <- (1 - s) v + s T v, renormalised at state 0
    const double shift = kSelfLoop * diff[0];
    for (std::size_t x = 0; x < n; ++x) v[x] += kSelfLoop * diff[x] - shift;
  }
  throw non_convergence_error("rvi_solve: no convergence after " + std::to_string(opts.max_iter) +
                                  " iterations (span " + std::to_string(span) + ")",
                              opts.max_iter, span);
}

double action_gap(const ValueSolution& sol, const KernelPair& kernels, int x) {
  return kernels.accept.expect(x, sol.v) - kernels.reject.expect(x, sol.v) - sol.lam;
}

ThresholdPolicy greedy_policy(const ValueSolution& sol, const KernelPair& kernels) {
  const int n_max = kernels.accept.n_max();
  if (static_cast<int>(sol.v.size()) != n_max + 1)
    throw std::invalid_argument("greedy_policy: solution and kernels disagree on n_max");
  int t = -1;
  bool rejected = false;
  for (int x = 0; x < n_max; ++x) {
    const bool accept = action_gap(sol, kernels, x) <= kTieTol;
    if (accept && rejected)
      throw structure_violation_error("greedy_policy: accept at x = " + std::to_string(x) +
                                      " above a rejecting state; accept set is not a down-set");
    if (accept) t = x;
    else rejected = true;
  }
  return ThresholdPolicy{t};
}

ThresholdSystem::ThresholdSystem(const KernelPair& kernels, double c, ThresholdPolicy policy)
    : n_max_(kernels.accept.n_max()) {
  check_threshold(policy, n_max_);
  const std::size_t n = static_cast<std::size_t>(n_max_) + 2;
  const std::size_t eta = n - 1;
  DenseMatrix a(n);
  std::vector<double> rhs_base(n, 0.0);
  std::vector<double> rhs_tax(n, 0.0);
  for (int x = 0; x <= n_max_; ++x) {
    const auto row = static_cast<std::size_t>(x);
    a(row, row) += 1.0;
    for (const auto& e : kernel_for(kernels, policy, x).row(x)) a(row, static_cast<std::size_t>(e.next)) -= e.prob;
    a(row, eta) = 1.0;
    rhs_base[row] = c * x;
    rhs_tax[row] = policy.accepts(x) ? 0.0 : 1.0;
  }
  a(eta, 0) = 1.0;  // V(0) = 0
  const DenseLu lu(std::move(a));
  base_ = lu.solve(rhs_base);
  tax_ = lu.solve(rhs_tax);
}

ThresholdEvaluation ThresholdSystem::solve(double lam) const {
  ThresholdEvaluation out;
  out.v.resize(static_cast<std::size_t>(n_max_) + 1);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = base_[i] + lam * tax_[i];
  out.v[0] = 0.0;
  out.eta = base_.back() + lam * tax_.back();
  return out;
}

ThresholdEvaluation evaluate_threshold(const BsParams& params, int m, double p, double lam,
                                       ThresholdPolicy policy, int n_max) {
  check_threshold(policy, n_max);
  return ThresholdSystem(transition_kernels(params, m, p, n_max), params.c, policy).solve(lam);
}

StationaryDistribution stationary_distribution(const BsParams& params, int m, double p,
                                               ThresholdPolicy policy, int n_max) {
  check_threshold(policy, n_max);
  const KernelPair k = transition_kernels(params, m, p, n_max);
  const std::size_t n = static_cast<std::size_t>(n_max) + 1;
  // Balance equations nu(j) = sum_x nu(x) P(j | x); the one for state 0 is
  // replaced by the normalisation sum nu = 1.
  DenseMatrix a(n);
  for (int x = 0; x <= n_max; ++x) {
    for (const auto& e : kernel_for(k, policy, x).row(x))
      a(static_cast<std::size_t>(e.next), static_cast<std::size_t>(x)) += e.prob;
  }
  for (std::size_t j = 0; j < n; ++j) a(j, j) -= 1.0;
  for (std::size_t x = 0; x < n; ++x) a(0, x) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[0] = 1.0;
  std::vector<double> nu = DenseLu(std::move(a)).solve(rhs);
  double total = 0.0;
  for (double& e : nu) {
    if (e < 0.0) {
      if (e < -1e-10) throw singular_system_error("stationary_distribution: negative mass, chain is not unichain");
      e = 0.0;
    }
    total += e;
  }
  for (double& e : nu) e /= total;
  return StationaryDistribution{std::move(nu)};
}

double average_cost_f(const BsParams& params, int m, double p, double lam, ThresholdPolicy policy,
                      int n_max) {
  const StationaryDistribution dist = stationary_distribution(params, m, p, policy, n_max);
  double holding = 0.0;
  double passive = 0.0;
  for (int x = 0; x <= n_max; ++x) {
    const double mass = dist.nu[static_cast<std::size_t>(x)];
    holding += x * mass;
    if (!policy.accepts(x)) passive += mass;
  }
  return params.c * holding + lam * passive;
}

double advantage_h(const ValueSolution& sol, const BsParams& params, int m, double p, int x) {
  const int n_max = static_cast<int>(sol.v.size()) - 1;
  if (x < 0 || x >= n_max)
    throw std::out_of_range("advantage_h: x must lie in [0, n_max), got " + std::to_string(x));
  const DeparturePmf pmf = departure_pmf(x, params, m);
  double h = 0.0;
  for (int d = 0; d <= pmf.max_departures(); ++d) {
    const auto lo = static_cast<std::size_t>(x - d);
    h += pmf.probs[static_cast<std::size_t>(d)] * (sol.v[lo + 1] - sol.v[lo]);
  }
  return p * h;
}

}  // namespace wia
