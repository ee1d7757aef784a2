// Command-line front end: stability | index | simulate | compare | sweep.
// Exit codes: 0 ok, 1 domain failure (instability, non-convergence), 2 usage
// or parse error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wia/csv.hpp"
#include "wia/errors.hpp"
#include "wia/experiment.hpp"
#include "wia/model.hpp"
#include "wia/policy.hpp"
#include "wia/sim.hpp"
#include "wia/whittle.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string seeds;
  std::string out;
  std::vector<std::string> policies;
  std::optional<int> stride;
  bool report_deviation = false;
};

std::vector<wia::PolicyName> resolve_policies(const Options& opt, const wia::ExperimentSpec& spec) {
  if (opt.policies.empty()) return spec.policies;
  std::vector<wia::PolicyName> out;
  for (const std::string& name : opt.policies) {
    const auto parsed = wia::parse_policy(name);
    if (!parsed) throw std::invalid_argument("unknown policy '" + name + "'");
    out.push_back(*parsed);
  }
  return out;
}

std::vector<std::uint64_t> resolve_seeds(const Options& opt, const wia::ExperimentSpec& spec) {
  if (!opt.seeds.empty()) return wia::parse_seed_list(opt.seeds);
  if (!spec.seeds.empty()) return spec.seeds;
  return {spec.base.seed};
}

// Writes to --out when given, stdout otherwise.
template <typename WriteFn>
void emit(const std::string& path, WriteFn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file " + path);
  write(file);
}

int cmd_stability(const Options& opt) {
  const wia::ExperimentSpec spec = wia::load_experiment(opt.config);
  const wia::NetworkConfig& net = spec.base;
  for (int i = 0; i < net.k(); ++i) {
    const wia::BsParams& bs = net.bs[static_cast<std::size_t>(i)];
    std::cout << "bs " << i << ": service rate " << wia::format_double(wia::service_rate(bs, net.m)) << ", margin "
              << wia::format_double(wia::stability_margin(bs, net.m, net.p)) << '\n';
  }
  const double margin = wia::stability_margin(net);
  const bool stable = margin > 0.0;
  std::cout << "overall margin " << wia::format_double(margin) << (stable ? " (stable)" : " (not certified stable)")
            << '\n';
  return stable ? kOk : kDomainFailure;
}

int cmd_index(const Options& opt) {
  const wia::ExperimentSpec spec = wia::load_experiment(opt.config);
  const int stride = opt.stride.value_or(spec.stride);
  const wia::WhittleTable table = wia::build_table(spec.base, stride, spec.index);
  emit(opt.out, [&](std::ostream& os) { wia::write_table_csv(os, table); });

  bool monotone = true;
  for (std::size_t bs = 0; bs < table.per_bs.size(); ++bs) {
    const auto& col = table.per_bs[bs];
    int violations = 0;
    for (std::size_t x = 0; x + 1 < col.size(); ++x)
      if (col[x + 1] < col[x]) ++violations;
    monotone = monotone && violations == 0;
    std::cerr << "bs " << bs << ": index(0) = " << wia::format_double(col.front()) << ", index(n_max-1) = "
              << wia::format_double(col[col.size() - 2]) << ", "
              << (violations == 0 ? "non-decreasing in state" : std::to_string(violations) + " monotonicity violations")
              << '\n';
  }
  if (opt.report_deviation && stride > 1) {
    const wia::WhittleTable exact = wia::build_table(spec.base, 1, spec.index);
    double worst = 0.0;
    for (std::size_t bs = 0; bs < exact.per_bs.size(); ++bs)
      for (int x = 0; x < table.n_max; ++x)
        worst = std::max(worst, std::abs(table.index(static_cast<int>(bs), x) - exact.index(static_cast<int>(bs), x)));
    std::cerr << "max |stride " << stride << " - exact| = " << wia::format_double(worst) << '\n';
  }
  return monotone ? kOk : kDomainFailure;
}

int cmd_simulate(const Options& opt) {
  const wia::ExperimentSpec spec = wia::load_experiment(opt.config);
  const auto policies = resolve_policies(opt, spec);
  const auto seeds = resolve_seeds(opt, spec);
  if (policies.size() != 1 || seeds.size() != 1)
    throw std::invalid_argument("simulate takes exactly one --policy and one seed");
  wia::NetworkConfig net = spec.base;
  net.seed = seeds.front();
  wia::PolicyKind kind{policies.front()};
  if (kind.name == wia::PolicyName::whittle)
    kind.table = std::make_shared<const wia::WhittleTable>(wia::build_table(net, opt.stride.value_or(spec.stride), spec.index));
  const wia::SimMetrics m = wia::run(net, kind, wia::SimOptions{!opt.out.empty()});
  if (!opt.out.empty()) emit(opt.out, [&](std::ostream& os) { wia::write_trace_csv(os, net, m); });
  std::cout << "policy " << wia::to_string(kind.name) << ", seed " << net.seed << '\n'
            << "avg_cost " << wia::format_double(m.avg_cost) << '\n'
            << "avg_delay_minislots " << wia::format_double(m.avg_delay) << '\n'
            << "jfi " << wia::format_double(m.jfi) << (m.jfi_defined ? "" : " (no completed users)") << '\n'
            << "arrivals " << m.arrivals << ", admitted " << m.admitted << ", completed " << m.completed
            << ", dropped " << m.dropped << ", still associated " << m.still_associated << '\n';
  return kOk;
}

int cmd_compare(const Options& opt) {
  const wia::ExperimentSpec spec = wia::load_experiment(opt.config);
  wia::IndexCache cache;
  const auto rows = wia::run_compare(spec.base, resolve_policies(opt, spec), resolve_seeds(opt, spec),
                                     opt.stride.value_or(spec.stride), spec.index, cache);
  emit(opt.out, [&](std::ostream& os) { wia::write_metrics_csv(os, rows); });
  return kOk;
}

int cmd_sweep(const Options& opt) {
  wia::ExperimentSpec spec = wia::load_experiment(opt.config);
  if (!spec.sweep) throw std::invalid_argument("config has no sweep section");
  spec.policies = resolve_policies(opt, spec);
  spec.seeds = resolve_seeds(opt, spec);
  if (opt.stride) spec.stride = *opt.stride;
  wia::IndexCache cache;
  const auto rows = wia::run_sweep(spec, cache);
  emit(opt.out, [&](std::ostream& os) { wia::write_metrics_csv(os, rows); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whittle-index user association: MDP solver, index tables and network simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", opt.config, "Experiment file (JSON)")->required(); };
  auto* stability = app.add_subcommand("stability", "Print per-BS and overall stability margins");
  add_config(stability);
  auto* index = app.add_subcommand("index", "Build the Whittle index table and write it as CSV");
  add_config(index);
  index->add_option("--stride", opt.stride, "Compute every stride-th state, interpolate the rest")->check(CLI::PositiveNumber);
  index->add_option("--out", opt.out, "Output CSV (default stdout)");
  index->add_flag("--report-deviation", opt.report_deviation, "Compare an interpolated table with the exact one");
  auto* simulate = app.add_subcommand("simulate", "Run one policy for one seed");
  add_config(simulate);
  simulate->add_option("--policy", opt.policies, "whittle | random | load | snr | throughput | mixed")->required();
  simulate->add_option("--seeds", opt.seeds, "Seed (defaults to the config seed)");
  simulate->add_option("--stride", opt.stride, "Index table stride")->check(CLI::PositiveNumber);
  simulate->add_option("--out", opt.out, "Trace CSV: slot, cost, per-BS state");
  auto* compare = app.add_subcommand("compare", "Run policies x seeds and write the metrics CSV");
  add_config(compare);
  compare->add_option("--seeds", opt.seeds, "Seed list, e.g. 1-10 or 1,4,9");
  compare->add_option("--policy", opt.policies, "Restrict to these policies");
  compare->add_option("--stride", opt.stride, "Index table stride")->check(CLI::PositiveNumber);
  compare->add_option("--out", opt.out, "Output CSV (default stdout)");
  auto* sweep = app.add_subcommand("sweep", "Run the config's sweep and write the long-format metrics CSV");
  add_config(sweep);
  sweep->add_option("--seeds", opt.seeds, "Seed list, e.g. 1-10 or 1,4,9");
  sweep->add_option("--policy", opt.policies, "Restrict to these policies");
  sweep->add_option("--stride", opt.stride, "Index table stride")->check(CLI::PositiveNumber);
  sweep->add_option("--out", opt.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*stability) return cmd_stability(opt);
    if (*index) return cmd_index(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*compare) return cmd_compare(opt);
    if (*sweep) return cmd_sweep(opt);
  } catch (const wia::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const wia::non_convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kUsage;
}
