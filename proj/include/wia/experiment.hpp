#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wia/model.hpp"
#include "wia/policy.hpp"
#include "wia/sim.hpp"
#include "wia/whittle.hpp"

namespace wia {

/// Bad experiment file. line/column are 1-based; 0 when not tied to a position.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// param is one of "M", "K", "p". K sweeps grow the BS list with `rule`
/// ("fig6", "fig7", "fig8"); K values at or below the base size truncate it.
struct SweepSpec {
  std::string param;
  std::vector<double> values;
  std::string rule = "none";

  bool operator==(const SweepSpec&) const = default;
};

struct ExperimentSpec {
  NetworkConfig base;
  std::vector<PolicyName> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  std::vector<std::uint64_t> seeds;  // empty means {base.seed}
  std::optional<SweepSpec> sweep;
  int stride = 1;
  IndexIterConfig index;

  bool operator==(const ExperimentSpec&) const = default;
};

/// JSON (with // comments allowed) whose top-level keys mirror NetworkConfig:
/// k, m, p, bs[{q, r, r_prime, c}], n_max, horizon, measure_window, seed;
/// plus optional policies, seeds, stride, sweep{param, values, rule} and
/// index{gamma, tol, max_iter, lambda0}.
ExperimentSpec parse_experiment(std::string_view text);
ExperimentSpec load_experiment(const std::filesystem::path& path);
std::string serialize_experiment(const ExperimentSpec& spec);

/// Parameters of the i-th BS (1-based) added by the figure sweep rules.
BsParams fig6_bs(int i);
BsParams fig7_bs(int i);
BsParams fig8_bs(const BsParams& previous, int i);

/// Network for one sweep value. Throws std::invalid_argument naming the value
/// when the rule yields invalid parameters.
NetworkConfig apply_sweep_value(const NetworkConfig& base, const SweepSpec& sweep, double value);

/// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct MetricsRow {
  std::string policy;
  std::uint64_t seed = 0;
  std::string sweep_param;
  std::string sweep_value;
  double avg_cost = 0.0;
  double avg_delay_minislots = 0.0;
  double jfi = 1.0;
  long dropped = 0;
};

/// Whittle index columns memoised by (BS parameters, M, p, n_max, stride).
class IndexCache {
 public:
  std::shared_ptr<const WhittleTable> table_for(const NetworkConfig& config, int stride, const IndexIterConfig& cfg);
  std::size_t columns_built() const { return columns_.size(); }

 private:
  std::map<std::string, std::vector<double>> columns_;
};

/// All (policy, seed) runs of one network, in policy-major then seed order.
std::vector<MetricsRow> run_compare(const NetworkConfig& config, const std::vector<PolicyName>& policies,
                                    const std::vector<std::uint64_t>& seeds, int stride, const IndexIterConfig& cfg,
                                    IndexCache& cache, const std::string& sweep_param = "",
                                    const std::string& sweep_value = "");

/// run_compare for every sweep value, concatenated in sweep order.
std::vector<MetricsRow> run_sweep(const ExperimentSpec& spec, IndexCache& cache);

/// policy,seed,sweep_param,sweep_value,avg_cost,avg_delay_minislots,jfi,dropped
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// slot,cost,state_0..state_{K-1}; needs a run with record_states.
void write_trace_csv(std::ostream& out, const NetworkConfig& config, const SimMetrics& metrics);

}  // namespace wia
