#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wia {

/// Jamming, service and cost parameters of one base station.
struct BsParams {
  double q = 0.5;        // P(channel jammed in a slot)
  double r = 0.0;        // per-mini-slot departure probability when jammed
  double r_prime = 0.0;  // per-mini-slot departure probability when clear
  double c = 1.0;        // holding cost per user per slot

  bool operator==(const BsParams&) const = default;
};

/// Throws std::invalid_argument unless 0 < q < 1, 0 <= r <= r_prime <= 1
/// and c >= 0.
void validate(const BsParams& params);

/// Mean departures per slot from a backlogged BS: M (q r + (1 - q) r').
double service_rate(const BsParams& params, int m);

struct NetworkConfig {
  int m = 1;                  // mini-slots per slot
  double p = 0.5;             // arrival probability per slot
  std::vector<BsParams> bs;   // one entry per BS
  int n_max = 200;            // max users associated with one BS
  long horizon = 20000;       // simulated slots
  long measure_window = 10000;  // trailing slots used for avg cost
  std::uint64_t seed = 1;

  int k() const { return static_cast<int>(bs.size()); }
  bool operator==(const NetworkConfig&) const = default;
};

void validate(const NetworkConfig& config);

/// Distribution of the number of departures in one slot from state x.
/// probs[d] = P(D = d) for d = 0 .. min(x, M).
struct DeparturePmf {
  std::vector<double> probs;

  int max_departures() const { return static_cast<int>(probs.size()) - 1; }
};

DeparturePmf departure_pmf(int x, const BsParams& params, int m);

/// Row-sparse stochastic matrix over states 0..n_max for one action.
class TransitionKernel {
 public:
  struct Entry {
    int next;
    double prob;
  };

  explicit TransitionKernel(std::vector<std::vector<Entry>> rows) : rows_(std::move(rows)) {}

  int n_max() const { return static_cast<int>(rows_.size()) - 1; }
  std::span<const Entry> row(int x) const { return rows_.at(static_cast<std::size_t>(x)); }
  double probability(int x, int next) const;

  /// sum_j P(j | x) v[j]
  double expect(int x, std::span<const double> v) const {
    double acc = 0.0;
    for (const Entry& e : rows_[static_cast<std::size_t>(x)]) acc += e.prob * v[static_cast<std::size_t>(e.next)];
    return acc;
  }

 private:
  std::vector<std::vector<Entry>> rows_;
};

struct KernelPair {
  TransitionKernel accept;
  TransitionKernel reject;
};

/// Controlled transition kernels of one BS. Accept: x -> x - D + arrival,
/// with moves above n_max redirected to n_max. Reject: x -> x - D.
KernelPair transition_kernels(const BsParams& params, int m, double p, int n_max);

/// min_i M (q_i r_i + (1 - q_i) r'_i) - p. Positive means every BS chain is
/// positive recurrent under any admission rule.
double stability_margin(const NetworkConfig& config);
double stability_margin(const BsParams& params, int m, double p);

}  // namespace wia
