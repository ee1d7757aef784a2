#include <array>
#include <memory>

#include "doctest.h"
#include "wia/policy.hpp"

using wia::PolicyKind;
using wia::PolicyName;

namespace {

wia::NetworkConfig fig2() {
  wia::NetworkConfig cfg;
  cfg.m = 20;
  cfg.p = 0.6;
  cfg.n_max = 50;
  cfg.bs = {{0.2, 0.20, 0.78, 95}, {0.2, 0.19, 0.65, 75}, {0.2, 0.18, 0.56, 58}, {0.2, 0.17, 0.50, 40},
            {0.2, 0.16, 0.45, 32}};
  return cfg;
}

wia::NetworkConfig identical(int k) {
  wia::NetworkConfig cfg;
  cfg.m = 2;
  cfg.p = 0.5;
  cfg.n_max = 10;
  cfg.bs.assign(static_cast<std::size_t>(k), wia::BsParams{0.3, 0.2, 0.6, 1.0});
  return cfg;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (auto name : wia::kAllPolicies) CHECK(wia::parse_policy(wia::to_string(name)) == name);
  CHECK_FALSE(wia::parse_policy("best").has_value());
}

TEST_CASE("load picks the least loaded BS") {
  const auto cfg = identical(3);
  wia::Rng rng(1);
  const std::array states{3, 1, 2};
  CHECK(wia::decide(PolicyKind{PolicyName::load}, states, cfg, rng)->bs_id == 1);
}

TEST_CASE("snr ignores states") {
  const auto cfg = fig2();
  wia::Rng rng(1);
  for (const auto& states : {std::array{0, 0, 0, 0, 0}, std::array{40, 1, 2, 3, 0}, std::array{49, 0, 0, 0, 0}})
    CHECK(wia::decide(PolicyKind{PolicyName::snr}, states, cfg, rng)->bs_id == 0);
}

TEST_CASE("throughput with equal states picks the best rate") {
  const auto cfg = fig2();
  wia::Rng rng(1);
  const std::array states{4, 4, 4, 4, 4};
  CHECK(wia::decide(PolicyKind{PolicyName::throughput}, states, cfg, rng)->bs_id == 0);
  const std::array skewed{30, 0, 0, 0, 0};
  CHECK(wia::decide(PolicyKind{PolicyName::throughput}, skewed, cfg, rng)->bs_id == 1);
}

TEST_CASE("mixed weighs rate and load") {
  const auto cfg = fig2();
  wia::Rng rng(1);
  // rates: 13.28, 11.16, 9.68, 8.68, 7.84
  const std::array states{3, 0, 0, 0, 0};
  // BS0: 13.28 * 0.45 = 5.976, BS1: 11.16 * 1.2 = 13.392
  CHECK(wia::decide(PolicyKind{PolicyName::mixed}, states, cfg, rng)->bs_id == 1);
  PolicyKind heavy{PolicyName::mixed};
  heavy.mixed_weight = 10.0;
  CHECK(wia::decide(heavy, states, cfg, rng)->bs_id == 0);
  heavy.mixed_weight = 0.0;
  CHECK_THROWS_AS(wia::decide(heavy, states, cfg, rng), std::invalid_argument);
}

TEST_CASE("whittle with identical BSs picks the least loaded") {
  const auto cfg = identical(3);
  PolicyKind kind{PolicyName::whittle, std::make_shared<const wia::WhittleTable>(wia::build_table(cfg, 1))};
  wia::Rng rng(1);
  const std::array states{4, 2, 7};
  CHECK(wia::decide(kind, states, cfg, rng)->bs_id == 1);
}

TEST_CASE("whittle without a matching table is rejected") {
  const auto cfg = identical(3);
  wia::Rng rng(1);
  const std::array states{0, 0, 0};
  CHECK_THROWS_AS(wia::decide(PolicyKind{PolicyName::whittle}, states, cfg, rng), std::invalid_argument);
  PolicyKind other{PolicyName::whittle, std::make_shared<const wia::WhittleTable>(wia::build_table(identical(2), 1))};
  CHECK_THROWS_AS(wia::decide(other, states, cfg, rng), std::invalid_argument);
}

TEST_CASE("full BSs are never chosen") {
  const auto cfg = identical(3);
  const PolicyKind whittle{PolicyName::whittle, std::make_shared<const wia::WhittleTable>(wia::build_table(cfg, 1))};
  wia::Rng rng(5);
  const std::array one_left{10, 10, 9};
  const std::array all_full{10, 10, 10};
  for (auto name : wia::kAllPolicies) {
    PolicyKind kind = name == PolicyName::whittle ? whittle : PolicyKind{name};
    for (int i = 0; i < 20; ++i) CHECK(wia::decide(kind, one_left, cfg, rng)->bs_id == 2);
    CHECK_FALSE(wia::decide(kind, all_full, cfg, rng).has_value());
  }
}

TEST_CASE("ties are broken uniformly and draw only when needed") {
  const auto cfg = identical(4);
  const std::array states{1, 1, 1, 1};
  wia::Rng rng(123);
  std::array<int, 4> counts{};
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(wia::decide(PolicyKind{PolicyName::load}, states, cfg, rng)->bs_id)];
  for (int c : counts) CHECK(std::abs(c - n / 4) < 4 * std::sqrt(n * 0.25 * 0.75));

  wia::Rng a(9), b(9);
  const std::array unique{0, 3, 3, 3};
  CHECK(wia::decide(PolicyKind{PolicyName::load}, unique, cfg, a)->bs_id == 0);
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("state vector length is checked") {
  const auto cfg = identical(3);
  wia::Rng rng(1);
  const std::array states{0, 0};
  CHECK_THROWS_AS(wia::decide(PolicyKind{PolicyName::random}, states, cfg, rng), std::invalid_argument);
}
