#pragma once

#include <iosfwd>
#include <vector>

#include "wia/model.hpp"

namespace wia {

/// Damped fixed-point iteration on the tax:
///   lam <- lam + gamma (E_accept[V_lam] - E_reject[V_lam] - lam)
struct IndexIterConfig {
  double gamma = 0.1;
  double tol = 1e-6;  // on |lam_{k+1} - lam_k|
  long max_iter = 100'000;
  double lambda0 = 0.0;

  bool operator==(const IndexIterConfig&) const = default;
};

void validate(const IndexIterConfig& cfg);

/// Whittle index of state x: the tax at which accepting and rejecting an
/// arrival at x cost the same. V_lam comes from the linear system of the
/// threshold-x policy. Returns +inf for x = n_max, where admission is
/// infeasible. Throws non_convergence_error (residual = last gap).
double index_iterative(const BsParams& params, int m, double p, int x, const IndexIterConfig& cfg,
                       int n_max);

/// Independent check of index_iterative: bisects on lam until the optimal
/// action at x (rvi_solve + greedy_policy) flips from reject to accept.
double index_bisection(const BsParams& params, int m, double p, int x, int n_max, double tol);

/// Per-BS index as a function of state. Entries between computed states are
/// linearly interpolated; the n_max entry is always +inf.
struct WhittleTable {
  std::vector<std::vector<double>> per_bs;
  std::vector<int> computed_states;  // ascending, shared by every BS
  int n_max = 0;

  double index(int bs, int x) const {
    return per_bs[static_cast<std::size_t>(bs)][static_cast<std::size_t>(x)];
  }
  bool is_computed(int x) const;
};

/// States at which build_table runs the iteration: 0, stride, 2 stride, ...,
/// then n_max - 1 and n_max.
std::vector<int> computed_grid(int n_max, int stride);

/// stride = 1 computes every state exactly. Otherwise states 0, stride,
/// 2 stride, ... plus n_max - 1 are computed and the rest interpolated.
WhittleTable build_table(const NetworkConfig& config, int stride, const IndexIterConfig& cfg = {});

/// Linear interpolation of `values` between the entries at `computed_states`.
void interpolate_between(std::vector<double>& values, const std::vector<int>& computed_states);

/// CSV columns: bs_id,state,index,computed_flag
void write_table_csv(std::ostream& out, const WhittleTable& table);

}  // namespace wia
