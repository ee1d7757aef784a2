#include "wia/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wia/csv.hpp"
#include "wia/parallel.hpp"

namespace wia {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key)) throw config_error(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& obj, const std::string& key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

BsParams parse_bs(const json& j, const std::string& where) {
  if (!j.is_object()) throw config_error(where + ": expected an object");
  reject_unknown_keys(j, {"q", "r", "r_prime", "c"}, where);
  BsParams bs;
  bs.q = get_as<double>(j, "q", where);
  bs.r = get_as<double>(j, "r", where);
  bs.r_prime = get_as<double>(j, "r_prime", where);
  bs.c = get_as<double>(j, "c", where);
  return bs;
}

std::string cache_key(const BsParams& bs, const NetworkConfig& config, int stride, const IndexIterConfig& cfg) {
  std::ostringstream key;
  for (double v : {bs.q, bs.r, bs.r_prime, bs.c, config.p, cfg.gamma, cfg.tol, cfg.lambda0}) key << format_double(v) << '|';
  key << config.m << '|' << config.n_max << '|' << stride << '|' << cfg.max_iter;
  return key.str();
}

int as_integer(double value, const std::string& what) {
  if (value != std::floor(value) || value < 1.0 || value > 1e6)
    throw std::invalid_argument("sweep value " + format_double(value) + " for " + what + " is not a positive integer");
  return static_cast<int>(value);
}

}  // namespace

ExperimentSpec parse_experiment(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw config_error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                           e.what(),
                       line, column);
  }
  if (!root.is_object()) throw config_error("config: top level must be an object");
  reject_unknown_keys(root,
                      {"k", "m", "p", "bs", "n_max", "horizon", "measure_window", "seed", "policies", "seeds", "stride",
                       "sweep", "index"},
                      "config");

  ExperimentSpec spec;
  NetworkConfig& net = spec.base;
  net.m = get_as<int>(root, "m", "config");
  net.p = get_as<double>(root, "p", "config");
  read_optional(root, "n_max", "config", net.n_max);
  read_optional(root, "horizon", "config", net.horizon);
  read_optional(root, "measure_window", "config", net.measure_window);
  read_optional(root, "seed", "config", net.seed);
  const json& bs = root.contains("bs") ? root.at("bs") : throw config_error("config: missing key 'bs'");
  if (!bs.is_array()) throw config_error("config.bs: expected an array");
  for (std::size_t i = 0; i < bs.size(); ++i) net.bs.push_back(parse_bs(bs[i], "config.bs[" + std::to_string(i) + "]"));
  if (root.contains("k") && get_as<int>(root, "k", "config") != net.k())
    throw config_error("config.k = " + std::to_string(get_as<int>(root, "k", "config")) + " but bs lists " +
                       std::to_string(net.k()) + " entries");

  if (root.contains("policies")) {
    spec.policies.clear();
    for (const auto& name : get_as<std::vector<std::string>>(root, "policies", "config")) {
      const auto parsed = parse_policy(name);
      if (!parsed) throw config_error("config.policies: unknown policy '" + name + "'");
      spec.policies.push_back(*parsed);
    }
    if (spec.policies.empty()) throw config_error("config.policies: empty list");
  }
  read_optional(root, "seeds", "config", spec.seeds);
  read_optional(root, "stride", "config", spec.stride);
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    if (!s.is_object()) throw config_error("config.sweep: expected an object");
    reject_unknown_keys(s, {"param", "values", "rule"}, "config.sweep");
    SweepSpec sweep;
    sweep.param = get_as<std::string>(s, "param", "config.sweep");
    sweep.values = get_as<std::vector<double>>(s, "values", "config.sweep");
    read_optional(s, "rule", "config.sweep", sweep.rule);
    spec.sweep = sweep;
  }
  if (root.contains("index")) {
    const json& ix = root.at("index");
    if (!ix.is_object()) throw config_error("config.index: expected an object");
    reject_unknown_keys(ix, {"gamma", "tol", "max_iter", "lambda0"}, "config.index");
    read_optional(ix, "gamma", "config.index", spec.index.gamma);
    read_optional(ix, "tol", "config.index", spec.index.tol);
    read_optional(ix, "max_iter", "config.index", spec.index.max_iter);
    read_optional(ix, "lambda0", "config.index", spec.index.lambda0);
  }

  try {
    validate(net);
    validate(spec.index);
    if (spec.stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (spec.sweep) {
      if (spec.sweep->values.empty()) throw std::invalid_argument("sweep.values must not be empty");
      for (double v : spec.sweep->values) (void)apply_sweep_value(net, *spec.sweep, v);
    }
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

std::string serialize_experiment(const ExperimentSpec& spec) {
  const NetworkConfig& net = spec.base;
  json root;
  root["k"] = net.k();
  root["m"] = net.m;
  root["p"] = net.p;
  root["n_max"] = net.n_max;
  root["horizon"] = net.horizon;
  root["measure_window"] = net.measure_window;
  root["seed"] = net.seed;
  json bs = json::array();
  for (const BsParams& b : net.bs) bs.push_back({{"q", b.q}, {"r", b.r}, {"r_prime", b.r_prime}, {"c", b.c}});
  root["bs"] = bs;
  json policies = json::array();
  for (PolicyName p : spec.policies) policies.push_back(std::string(to_string(p)));
  root["policies"] = policies;
  if (!spec.seeds.empty()) root["seeds"] = spec.seeds;
  root["stride"] = spec.stride;
  if (spec.sweep) root["sweep"] = {{"param", spec.sweep->param}, {"values", spec.sweep->values}, {"rule", spec.sweep->rule}};
  root["index"] = {{"gamma", spec.index.gamma},
                   {"tol", spec.index.tol},
                   {"max_iter", spec.index.max_iter},
                   {"lambda0", spec.index.lambda0}};
  return root.dump(2) + "\n";
}

BsParams fig6_bs(int i) {
  return BsParams{0.152 - 0.002 * i, 0.29 - 0.01 * i, 0.41 - 0.01 * i, 160.0 - 10.0 * i};
}

BsParams fig7_bs(int i) {
  const double q = (i % 2) * 0.25 + ((i - 1) % 2) * 0.24;
  return BsParams{q, 0.185 - 0.005 * i, 0.383 - 0.003 * i, 100.3 - 0.003 * i};
}

BsParams fig8_bs(const BsParams& previous, int i) {
  const double step = (i % 2) * 0.001 - ((i - 1) % 2) * 0.002;
  return BsParams{previous.q + step, previous.r + step, previous.r_prime + step, 100.1 - 0.1 * i};
}

NetworkConfig apply_sweep_value(const NetworkConfig& base, const SweepSpec& sweep, double value) {
  NetworkConfig out = base;
  if (sweep.param == "M") {
    if (sweep.rule != "none") throw std::invalid_argument("sweep rule '" + sweep.rule + "' applies only to K sweeps");
    out.m = as_integer(value, "M");
  } else if (sweep.param == "p") {
    if (sweep.rule != "none") throw std::invalid_argument("sweep rule '" + sweep.rule + "' applies only to K sweeps");
    out.p = value;
  } else if (sweep.param == "K") {
    const int k = as_integer(value, "K");
    if (k < out.k()) {
      out.bs.resize(static_cast<std::size_t>(k));
    } else {
      for (int i = out.k() + 1; i <= k; ++i) {
        if (sweep.rule == "fig6") out.bs.push_back(fig6_bs(i));
        else if (sweep.rule == "fig7") out.bs.push_back(fig7_bs(i));
        else if (sweep.rule == "fig8") out.bs.push_back(fig8_bs(out.bs.back(), i));
        else
          throw std::invalid_argument("K = " + std::to_string(k) + " exceeds the " + std::to_string(base.k()) +
                                      " listed BSs and rule '" + sweep.rule + "' cannot generate more");
      }
    }
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + sweep.param + "' (expected M, K or p)");
  }
  try {
    validate(out);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("sweep " + sweep.param + " = " + format_double(value) + ": " + e.what());
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || part.empty())
      throw std::invalid_argument("bad seed '" + std::string(part) + "'");
    return v;
  };
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(number(item));
    } else {
      const std::uint64_t lo = number(item.substr(0, dash));
      const std::uint64_t hi = number(item.substr(dash + 1));
      if (hi < lo || hi - lo > 1'000'000) throw std::invalid_argument("bad seed range '" + std::string(item) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::shared_ptr<const WhittleTable> IndexCache::table_for(const NetworkConfig& config, int stride,
                                                          const IndexIterConfig& cfg) {
  NetworkConfig missing = config;
  missing.bs.clear();
  std::vector<std::string> keys;
  for (const BsParams& bs : config.bs) {
    keys.push_back(cache_key(bs, config, stride, cfg));
    if (!columns_.contains(keys.back()) &&
        std::find(missing.bs.begin(), missing.bs.end(), bs) == missing.bs.end())
      missing.bs.push_back(bs);
  }
  if (!missing.bs.empty()) {
    const WhittleTable built = build_table(missing, stride, cfg);
    for (std::size_t i = 0; i < missing.bs.size(); ++i)
      columns_[cache_key(missing.bs[i], config, stride, cfg)] = built.per_bs[i];
  }
  auto out = std::make_shared<WhittleTable>();
  out->n_max = config.n_max;
  out->computed_states = computed_grid(config.n_max, stride);
  for (const std::string& key : keys) out->per_bs.push_back(columns_.at(key));
  return out;
}

std::vector<MetricsRow> run_compare(const NetworkConfig& config, const std::vector<PolicyName>& policies,
                                    const std::vector<std::uint64_t>& seeds, int stride, const IndexIterConfig& cfg,
                                    IndexCache& cache, const std::string& sweep_param,
                                    const std::string& sweep_value) {
  validate(config);
  if (policies.empty()) throw std::invalid_argument("run_compare: no policies");
  if (seeds.empty()) throw std::invalid_argument("run_compare: no seeds");
  std::shared_ptr<const WhittleTable> table;
  if (std::find(policies.begin(), policies.end(), PolicyName::whittle) != policies.end())
    table = cache.table_for(config, stride, cfg);

  std::vector<MetricsRow> rows(policies.size() * seeds.size());
  parallel_for(rows.size(), [&](std::size_t job) {
    const PolicyName name = policies[job / seeds.size()];
    NetworkConfig run_config = config;
    run_config.seed = seeds[job % seeds.size()];
    PolicyKind kind{name, name == PolicyName::whittle ? table : nullptr};
    const SimMetrics m = run(run_config, kind);
    rows[job] = MetricsRow{std::string(to_string(name)), run_config.seed, sweep_param, sweep_value, m.avg_cost,
                           m.avg_delay, m.jfi, m.dropped};
  });
  return rows;
}

std::vector<MetricsRow> run_sweep(const ExperimentSpec& spec, IndexCache& cache) {
  if (!spec.sweep) throw std::invalid_argument("run_sweep: experiment has no sweep");
  if (spec.sweep->values.empty()) throw std::invalid_argument("run_sweep: empty sweep value list");
  const std::vector<std::uint64_t> seeds = spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;
  std::vector<MetricsRow> all;
  for (double value : spec.sweep->values) {
    const NetworkConfig config = apply_sweep_value(spec.base, *spec.sweep, value);
    auto rows = run_compare(config, spec.policies, seeds, spec.stride, spec.index, cache, spec.sweep->param,
                            format_double(value));
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "policy,seed,sweep_param,sweep_value,avg_cost,avg_delay_minislots,jfi,dropped\n";
  for (const MetricsRow& r : rows) {
    out << r.policy << ',' << r.seed << ',' << r.sweep_param << ',' << r.sweep_value << ',' << format_double(r.avg_cost)
        << ',' << format_double(r.avg_delay_minislots) << ',' << format_double(r.jfi) << ',' << r.dropped << '\n';
  }
}

void write_trace_csv(std::ostream& out, const NetworkConfig& config, const SimMetrics& metrics) {
  const auto k = static_cast<std::size_t>(config.k());
  if (metrics.state_trace.size() != metrics.cost_series.size() * k)
    throw std::invalid_argument("write_trace_csv: run was made without record_states");
  out << "slot,cost";
  for (std::size_t i = 0; i < k; ++i) out << ",state_" << i;
  out << '\n';
  for (std::size_t n = 0; n < metrics.cost_series.size(); ++n) {
    out << n << ',' << format_double(metrics.cost_series[n]);
    for (std::size_t i = 0; i < k; ++i) out << ',' << metrics.state_trace[n * k + i];
    out << '\n';
  }
}

}  // namespace wia
