#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wia/model.hpp"
#include "wia/rng.hpp"
#include "wia/whittle.hpp"

namespace wia {

enum class PolicyName { whittle, random, load, snr, throughput, mixed };

inline constexpr PolicyName kAllPolicies[] = {PolicyName::whittle, PolicyName::random, PolicyName::load,
                                              PolicyName::snr,     PolicyName::throughput, PolicyName::mixed};

std::string_view to_string(PolicyName name);
std::optional<PolicyName> parse_policy(std::string_view text);

struct PolicyKind {
  PolicyName name = PolicyName::random;
  std::shared_ptr<const WhittleTable> table;  // required for whittle
  double mixed_weight = 0.2;
};

struct Decision {
  int bs_id = 0;
};

/// BS chosen for an arrival given the slot-start states. BSs at n_max are never
/// candidates; returns nullopt when every BS is full. Ties are broken uniformly
/// with one rng draw, made only when more than one candidate remains.
///   random      uniform over candidates
///   load        argmin x_i
///   snr         argmax rate_i
///   throughput  argmax rate_i / (x_i + 1)
///   mixed       argmax rate_i (w + 1 / (x_i + 1))
///   whittle     argmin index_i(x_i)
/// with rate_i = M (q_i r_i + (1 - q_i) r'_i).
std::optional<Decision> decide(const PolicyKind& kind, std::span<const int> states, const NetworkConfig& config,
                               Rng& rng);

}  // namespace wia
