#include "wia/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace wia {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Binomial(m, prob) pmf for k = 0..m. The coefficient is accumulated as a
// double product so that C(120, 60) ~ 1e35 stays representable.
std::vector<double> binomial_pmf(int m, double prob) {
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  double coef = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) coef = coef * static_cast<double>(m - k + 1) / static_cast<double>(k);
    out[static_cast<std::size_t>(k)] = coef * std::pow(prob, k) * std::pow(1.0 - prob, m - k);
  }
  return out;
}

}  // namespace

void validate(const BsParams& params) {
  require(params.q > 0.0 && params.q < 1.0, "BsParams: q must lie in (0, 1)");
  require(params.r >= 0.0 && params.r <= 1.0, "BsParams: r must lie in [0, 1]");
  require(params.r_prime >= 0.0 && params.r_prime <= 1.0, "BsParams: r_prime must lie in [0, 1]");
  require(params.r <= params.r_prime, "BsParams: r must not exceed r_prime");
  require(params.c >= 0.0 && std::isfinite(params.c), "BsParams: c must be finite and non-negative");
}

double service_rate(const BsParams& params, int m) {
  return m * (params.q * params.r + (1.0 - params.q) * params.r_prime);
}

void validate(const NetworkConfig& config) {
  require(config.m >= 1, "NetworkConfig: m must be >= 1");
  require(config.p > 0.0 && config.p < 1.0, "NetworkConfig: p must lie in (0, 1)");
  require(!config.bs.empty(), "NetworkConfig: at least one BS is required");
  require(config.n_max >= 1, "NetworkConfig: n_max must be >= 1");
  require(config.horizon >= 1, "NetworkConfig: horizon must be >= 1");
  require(config.measure_window > 0 && config.measure_window <= config.horizon,
          "NetworkConfig: measure_window must lie in (0, horizon]");
  for (std::size_t i = 0; i < config.bs.size(); ++i) {
    try {
      validate(config.bs[i]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("bs[" + std::to_string(i) + "]: " + e.what());
    }
  }
}

DeparturePmf departure_pmf(int x, const BsParams& params, int m) {
  require(x >= 0, "departure_pmf: x must be >= 0");
  require(m >= 1, "departure_pmf: m must be >= 1");
  validate(params);
  if (x == 0) return DeparturePmf{{1.0}};

  const std::vector<double> jammed = binomial_pmf(m, params.r);
  const std::vector<double> clear = binomial_pmf(m, params.r_prime);
  const int top = std::min(x, m);
  DeparturePmf pmf;
  pmf.probs.assign(static_cast<std::size_t>(top) + 1, 0.0);
  for (int d = 0; d <= m; ++d) {
    const double mass = params.q * jammed[static_cast<std::size_t>(d)] +
                        (1.0 - params.q) * clear[static_cast<std::size_t>(d)];
    pmf.probs[static_cast<std::size_t>(std::min(d, top))] += mass;
  }
  return pmf;
}

double TransitionKernel::probability(int x, int next) const {
  for (const Entry& e : row(x))
    if (e.next == next) return e.prob;
  return 0.0;
}

KernelPair transition_kernels(const BsParams& params, int m, double p, int n_max) {
  require(n_max >= 1, "transition_kernels: n_max must be >= 1");
  require(m >= 1, "transition_kernels: m must be >= 1");
  require(p >= 0.0 && p <= 1.0, "transition_kernels: p must lie in [0, 1]");
  validate(params);

  using Rows = std::vector<std::vector<TransitionKernel::Entry>>;
  Rows accept(static_cast<std::size_t>(n_max) + 1);
  Rows reject(static_cast<std::size_t>(n_max) + 1);
  for (int x = 0; x <= n_max; ++x) {
    const DeparturePmf pmf = departure_pmf(x, params, m);
    std::map<int, double> acc;
    std::map<int, double> rej;
    for (int d = 0; d <= pmf.max_departures(); ++d) {
      const double pd = pmf.probs[static_cast<std::size_t>(d)];
      rej[x - d] += pd;
      acc[x - d] += (1.0 - p) * pd;
      acc[std::min(x - d + 1, n_max)] += p * pd;
    }
    for (const auto& [next, prob] : acc)
      if (prob > 0.0) accept[static_cast<std::size_t>(x)].push_back({next, prob});
    for (const auto& [next, prob] : rej)
      if (prob > 0.0) reject[static_cast<std::size_t>(x)].push_back({next, prob});
  }
  return KernelPair{TransitionKernel(std::move(accept)), TransitionKernel(std::move(reject))};
}

double stability_margin(const BsParams& params, int m, double p) {
  return service_rate(params, m) - p;
}

double stability_margin(const NetworkConfig& config) {
  validate(config);
  double margin = std::numeric_limits<double>::infinity();
  for (const BsParams& bs : config.bs) margin = std::min(margin, stability_margin(bs, config.m, config.p));
  return margin;
}

}  // namespace wia
