#include "wia/policy.hpp"

#include <stdexcept>
#include <string>

namespace wia {

std::string_view to_string(PolicyName name) {
  switch (name) {
    case PolicyName::whittle: return "whittle";
    case PolicyName::random: return "random";
    case PolicyName::load: return "load";
    case PolicyName::snr: return "snr";
    case PolicyName::throughput: return "throughput";
    case PolicyName::mixed: return "mixed";
  }
  return "unknown";
}

std::optional<PolicyName> parse_policy(std::string_view text) {
  for (PolicyName name : kAllPolicies)
    if (to_string(name) == text) return name;
  return std::nullopt;
}

namespace {

// Score to maximise for each policy.
double score(const PolicyKind& kind, int bs, int x, const NetworkConfig& config) {
  const BsParams& params = config.bs[static_cast<std::size_t>(bs)];
  switch (kind.name) {
    case PolicyName::random: return 0.0;
    case PolicyName::load: return -static_cast<double>(x);
    case PolicyName::snr: return service_rate(params, config.m);
    case PolicyName::throughput: return service_rate(params, config.m) / (x + 1.0);
    case PolicyName::mixed: return service_rate(params, config.m) * (kind.mixed_weight + 1.0 / (x + 1.0));
    case PolicyName::whittle: return -kind.table->index(bs, x);
  }
  return 0.0;
}

}  // namespace

std::optional<Decision> decide(const PolicyKind& kind, std::span<const int> states, const NetworkConfig& config,
                               Rng& rng) {
  if (static_cast<int>(states.size()) != config.k())
    throw std::invalid_argument("decide: state vector length differs from the number of BSs");
  if (kind.name == PolicyName::whittle) {
    if (!kind.table) throw std::invalid_argument("decide: whittle policy needs an index table");
    if (static_cast<int>(kind.table->per_bs.size()) != config.k() || kind.table->n_max != config.n_max)
      throw std::invalid_argument("decide: index table does not match the network");
  }
  if (kind.name == PolicyName::mixed && !(kind.mixed_weight > 0.0))
    throw std::invalid_argument("decide: mixed weight must be > 0");

  std::vector<int> best;
  best.reserve(states.size());
  double best_score = 0.0;
  for (int bs = 0; bs < config.k(); ++bs) {
    const int x = states[static_cast<std::size_t>(bs)];
    if (x >= config.n_max) continue;
    const double s = score(kind, bs, x, config);
    if (best.empty() || s > best_score) {
      best.assign(1, bs);
      best_score = s;
    } else if (s == best_score) {
      best.push_back(bs);
    }
  }
  if (best.empty()) return std::nullopt;
  if (best.size() == 1) return Decision{best.front()};
  return Decision{best[rng.pick(best.size())]};
}

}  // namespace wia
