#include "wia/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wia/csv.hpp"
#include "wia/errors.hpp"
#include "wia/mdp.hpp"
#include "wia/parallel.hpp"

namespace wia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDoublings = 60;

void check_state(int x, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (x < 0 || x > n_max)
    throw std::invalid_argument("state " + std::to_string(x) + " outside [0, " + std::to_string(n_max) + "]");
}

}  // namespace

void validate(const IndexIterConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("IndexIterConfig: gamma must be > 0");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("IndexIterConfig: tol must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("IndexIterConfig: max_iter must be >= 1");
  if (!std::isfinite(cfg.lambda0)) throw std::invalid_argument("IndexIterConfig: lambda0 must be finite");
}

double index_iterative(const BsParams& params, int m, double p, int x, const IndexIterConfig& cfg,
                       int n_max) {
  check_state(x, n_max);
  validate(cfg);
  const KernelPair k = transition_kernels(params, m, p, n_max);
  if (x == n_max) return kInf;

  const ThresholdSystem system(k, params.c, ThresholdPolicy{x});
  double lam = cfg.lambda0;
  double gap = 0.0;
  for (long it = 0; it < cfg.max_iter; ++it) {
    const ThresholdEvaluation ev = system.solve(lam);
    gap = k.accept.expect(x, ev.v) - k.reject.expect(x, ev.v) - lam;
    const double next = lam + cfg.gamma * gap;
    if (!std::isfinite(next)) break;
    if (std::abs(next - lam) < cfg.tol) return next;
    lam = next;
  }
  throw non_convergence_error("index_iterative: state " + std::to_string(x) + " did not converge (last lambda " +
                                  std::to_string(lam) + ", gap " + std::to_string(gap) + ")",
                              cfg.max_iter, gap);
}

double index_bisection(const BsParams& params, int m, double p, int x, int n_max, double tol) {
  check_state(x, n_max);
  if (!(tol > 0.0)) throw std::invalid_argument("index_bisection: tol must be > 0");
  const KernelPair k = transition_kernels(params, m, p, n_max);
  if (x == n_max) return kInf;

  std::vector<double> warm;
  auto accepts = [&](double lam) {
    RviOptions opts;
    opts.warm_start = warm;
    ValueSolution sol = rvi_solve(params, m, p, lam, n_max, opts);
    const bool accept = greedy_policy(sol, k).accepts(x);
    warm = std::move(sol.v);
    return accept;
  };

  double lo = -std::max(params.c * n_max, 1.0);
  double hi = std::max(params.c * n_max * m, 1.0);
  int doublings = 0;
  while (accepts(lo)) {
    if (++doublings > kMaxDoublings) throw bracket_failure_error("index_bisection: no rejecting tax found");
    lo *= 2.0;
  }
  doublings = 0;
  while (!accepts(hi)) {
    if (++doublings > kMaxDoublings) throw bracket_failure_error("index_bisection: no accepting tax found");
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (accepts(mid)) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

bool WhittleTable::is_computed(int x) const {
  return std::binary_search(computed_states.begin(), computed_states.end(), x);
}

void interpolate_between(std::vector<double>& values, const std::vector<int>& computed_states) {
  for (std::size_t i = 0; i + 1 < computed_states.size(); ++i) {
    const int a = computed_states[i];
    const int b = computed_states[i + 1];
    const double va = values[static_cast<std::size_t>(a)];
    const double vb = values[static_cast<std::size_t>(b)];
    for (int x = a + 1; x < b; ++x) {
      const double w = static_cast<double>(x - a) / static_cast<double>(b - a);
      values[static_cast<std::size_t>(x)] = (1.0 - w) * va + w * vb;
    }
  }
}

std::vector<int> computed_grid(int n_max, int stride) {
  if (n_max < 1) throw std::invalid_argument("computed_grid: n_max must be >= 1");
  if (stride < 1) throw std::invalid_argument("computed_grid: stride must be >= 1");
  std::vector<int> grid;
  const int last = n_max - 1;  // largest state where admission is feasible
  for (int x = 0; x <= last; x += stride) grid.push_back(x);
  if (grid.back() != last) grid.push_back(last);
  grid.push_back(n_max);
  return grid;
}

WhittleTable build_table(const NetworkConfig& config, int stride, const IndexIterConfig& cfg) {
  validate(config);
  validate(cfg);
  if (stride < 1) throw std::invalid_argument("build_table: stride must be >= 1");

  WhittleTable table;
  table.n_max = config.n_max;
  table.computed_states = computed_grid(config.n_max, stride);

  // BSs with identical parameters share one column.
  std::vector<std::size_t> column_of(config.bs.size());
  std::vector<BsParams> distinct;
  for (std::size_t i = 0; i < config.bs.size(); ++i) {
    const auto it = std::find(distinct.begin(), distinct.end(), config.bs[i]);
    column_of[i] = static_cast<std::size_t>(it - distinct.begin());
    if (it == distinct.end()) distinct.push_back(config.bs[i]);
  }

  const std::size_t per_column = table.computed_states.size();
  std::vector<std::vector<double>> columns(distinct.size(),
                                           std::vector<double>(static_cast<std::size_t>(config.n_max) + 1, 0.0));
  parallel_for(distinct.size() * per_column, [&](std::size_t job) {
    const std::size_t col = job / per_column;
    const int x = table.computed_states[job % per_column];
    try {
      columns[col][static_cast<std::size_t>(x)] =
          index_iterative(distinct[col], config.m, config.p, x, cfg, config.n_max);
    } catch (const non_convergence_error& e) {
      const auto first_bs = std::find(column_of.begin(), column_of.end(), col) - column_of.begin();
      throw non_convergence_error("BS " + std::to_string(first_bs) + ": " + e.what(), e.iterations(), e.residual());
    }
  });
  for (auto& column : columns) {
    // Interpolate over the finite part only; the n_max entry stays +inf.
    std::vector<int> finite(table.computed_states.begin(), table.computed_states.end() - 1);
    interpolate_between(column, finite);
  }
  table.per_bs.reserve(config.bs.size());
  for (std::size_t i = 0; i < config.bs.size(); ++i) table.per_bs.push_back(columns[column_of[i]]);
  return table;
}

void write_table_csv(std::ostream& out, const WhittleTable& table) {
  out << "bs_id,state,index,computed_flag\n";
  for (std::size_t bs = 0; bs < table.per_bs.size(); ++bs) {
    for (int x = 0; x <= table.n_max; ++x) {
      out << bs << ',' << x << ',' << format_double(table.per_bs[bs][static_cast<std::size_t>(x)]) << ','
          << (table.is_computed(x) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace wia
