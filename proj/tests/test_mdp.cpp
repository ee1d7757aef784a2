#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wia/errors.hpp"
#include "wia/mdp.hpp"

using wia::BsParams;
using wia::ThresholdPolicy;

namespace {

const BsParams kFig2Min{0.2, 0.16, 0.45, 32.0};

}  // namespace

TEST_CASE("rvi: zero cost and zero tax give V = 0") {
  const auto sol = wia::rvi_solve(BsParams{0.3, 0.2, 0.6, 0.0}, 2, 0.4, 0.0, 10);
  CHECK(sol.eta == doctest::Approx(0.0));
  for (double v : sol.v) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("rvi: huge tax makes every feasible state accepting") {
  const BsParams bs{0.3, 0.2, 0.6, 1.0};
  const int n_max = 12;
  const auto sol = wia::rvi_solve(bs, 2, 0.4, 1e9 * n_max, n_max);
  const auto k = wia::transition_kernels(bs, 2, 0.4, n_max);
  CHECK(wia::greedy_policy(sol, k).t == n_max - 1);
}

TEST_CASE("rvi: eta matches the best threshold policy") {
  const BsParams bs{0.4, 0.1, 0.5, 1.0};
  const int n_max = 12;
  const auto sol = wia::rvi_solve(bs, 2, 0.3, 5.0, n_max);
  // Oracle: exact evaluation of every threshold feasible with blocked admission at n_max.
  const double best = oracle::best_threshold_cost(bs, 2, 0.3, 5.0, -1, n_max - 1, n_max);
  CHECK(std::abs(sol.eta - best) < 1e-8);
  CHECK(sol.residual < 1e-8);
  CHECK(sol.v[0] == 0.0);
}

TEST_CASE("rvi: random instances agree with the threshold oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = oracle::random_stable_instance(gen, 3);
    const int n_max = 5 + trial % 10;
    const double lam = 20.0 * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const auto sol = wia::rvi_solve(in.bs, in.m, in.p, lam, n_max);
    int argmin = 0;
    const double best = oracle::best_threshold_cost(in.bs, in.m, in.p, lam, -1, n_max - 1, n_max, &argmin);
    CHECK(std::abs(sol.eta - best) < 1e-8);
    const auto k = wia::transition_kernels(in.bs, in.m, in.p, n_max);
    const auto t = wia::greedy_policy(sol, k).t;
    CHECK(oracle::threshold_cost(in.bs, in.m, in.p, lam, t, n_max) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("rvi: warm start reaches the same fixed point") {
  const BsParams bs{0.35, 0.15, 0.55, 2.0};
  const auto cold = wia::rvi_solve(bs, 2, 0.4, 3.0, 14);
  const auto near = wia::rvi_solve(bs, 2, 0.4, 3.5, 14);
  wia::RviOptions opts;
  opts.warm_start = near.v;
  const auto warm = wia::rvi_solve(bs, 2, 0.4, 3.0, 14, opts);
  CHECK(std::abs(warm.eta - cold.eta) < 1e-8);
  for (std::size_t x = 0; x < cold.v.size(); ++x) CHECK(warm.v[x] == doctest::Approx(cold.v[x]).epsilon(1e-7));
}

TEST_CASE("rvi: iteration budget exhausted") {
  wia::RviOptions opts;
  opts.max_iter = 3;
  CHECK_THROWS_AS(wia::rvi_solve(kFig2Min, 20, 0.6, 1.0, 30, opts), wia::non_convergence_error);
}

TEST_CASE("rvi: argument checks") {
  CHECK_THROWS_AS(wia::rvi_solve(kFig2Min, 2, 0.6, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(wia::rvi_solve(kFig2Min, 2, 1.5, 1.0, 10), std::invalid_argument);
  wia::RviOptions opts;
  std::vector<double> wrong(3, 0.0);
  opts.warm_start = wrong;
  CHECK_THROWS_AS(wia::rvi_solve(kFig2Min, 2, 0.5, 1.0, 10, opts), std::invalid_argument);
}

TEST_CASE("greedy policy: trivial costs") {
  const int n_max = 10;
  const BsParams free_bs{0.3, 0.2, 0.6, 0.0};
  const auto k = wia::transition_kernels(free_bs, 2, 0.4, n_max);
  CHECK(wia::greedy_policy(wia::rvi_solve(free_bs, 2, 0.4, 2.0, n_max), k).t == n_max - 1);
  CHECK(wia::greedy_policy(wia::rvi_solve(free_bs, 2, 0.4, -2.0, n_max), k).t == -1);
}

TEST_CASE("greedy policy: zero tax with positive holding cost rejects everywhere") {
  const int n_max = 30;
  const auto sol = wia::rvi_solve(kFig2Min, 20, 0.6, 0.0, n_max);
  const auto k = wia::transition_kernels(kFig2Min, 20, 0.6, n_max);
  CHECK(wia::greedy_policy(sol, k).t == -1);
  for (int x = 0; x < n_max; ++x) CHECK(wia::action_gap(sol, k, x) > 0.0);
}

TEST_CASE("threshold evaluation: trivial cases") {
  const BsParams bs{0.3, 0.2, 0.6, 0.0};
  const int n_max = 8;
  const auto all = wia::evaluate_threshold(bs, 1, 0.3, 4.0, ThresholdPolicy{n_max}, n_max);
  CHECK(std::abs(all.eta) < 1e-12);
  for (double v : all.v) CHECK(std::abs(v) < 1e-10);
  const auto none = wia::evaluate_threshold(bs, 1, 0.3, 4.0, ThresholdPolicy{-1}, n_max);
  CHECK(none.eta == doctest::Approx(4.0).epsilon(1e-12));
  for (double v : none.v) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("threshold evaluation matches the stationary cost") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 15; ++trial) {
    const auto in = oracle::random_stable_instance(gen, 3);
    const int n_max = 10;
    const int t = -1 + trial % (n_max + 2);
    const double lam = 3.0 + trial;
    const auto ev = wia::evaluate_threshold(in.bs, in.m, in.p, lam, ThresholdPolicy{t}, n_max);
    const auto nu = wia::stationary_distribution(in.bs, in.m, in.p, ThresholdPolicy{t}, n_max).nu;
    double f = 0.0;
    for (int x = 0; x <= n_max; ++x) f += nu[static_cast<std::size_t>(x)] * (in.bs.c * x + (x > t ? lam : 0.0));
    CHECK(ev.eta == doctest::Approx(f).epsilon(1e-10));
    CHECK(ev.eta == doctest::Approx(oracle::threshold_cost(in.bs, in.m, in.p, lam, t, n_max)).epsilon(1e-10));
    CHECK(ev.v[0] == 0.0);
  }
}

TEST_CASE("threshold system is affine in the tax") {
  const BsParams bs{0.25, 0.1, 0.7, 3.0};
  const auto k = wia::transition_kernels(bs, 3, 0.5, 15);
  const wia::ThresholdSystem sys(k, bs.c, ThresholdPolicy{6});
  for (double lam : {-2.0, 0.0, 7.5, 40.0}) {
    const auto direct = wia::evaluate_threshold(bs, 3, 0.5, lam, ThresholdPolicy{6}, 15);
    const auto fast = sys.solve(lam);
    CHECK(fast.eta == doctest::Approx(direct.eta).epsilon(1e-10));
    for (std::size_t x = 0; x < direct.v.size(); ++x)
      CHECK(fast.v[x] == doctest::Approx(direct.v[x]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("stationary distribution: birth-death closed form") {
  const BsParams bs{0.3, 0.2, 0.6, 1.0};
  const int n_max = 40;
  const auto nu = wia::stationary_distribution(bs, 1, 0.3, ThresholdPolicy{n_max}, n_max).nu;
  // Oracle: detailed balance with P0 = 0.52, P1 = 0.48.
  const double p0 = 0.52, p1 = 0.48, p = 0.3;
  const double first = p / ((1 - p) * p1);
  const double ratio = p * p0 / ((1 - p) * p1);
  CHECK(std::abs(nu[0] - 0.375) < 1e-6);
  CHECK(std::abs(nu[1] - 0.334821) < 1e-6);
  CHECK(nu[1] / nu[0] == doctest::Approx(first).epsilon(1e-9));
  for (int x = 1; x < 30; ++x) {
    CHECK(std::abs(nu[static_cast<std::size_t>(x + 1)] / nu[static_cast<std::size_t>(x)] - 0.464286) < 1e-6);
    CHECK(nu[static_cast<std::size_t>(x + 1)] / nu[static_cast<std::size_t>(x)] ==
          doctest::Approx(ratio).epsilon(1e-6));
  }
}

TEST_CASE("stationary distribution: reject-always is a point mass at zero") {
  const auto nu = wia::stationary_distribution(kFig2Min, 3, 0.6, ThresholdPolicy{-1}, 20).nu;
  CHECK(nu[0] == doctest::Approx(1.0));
  for (std::size_t x = 1; x < nu.size(); ++x) CHECK(std::abs(nu[x]) < 1e-12);
}

TEST_CASE("stationary distribution matches the Eigen oracle") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 15; ++trial) {
    const auto in = oracle::random_stable_instance(gen, 3);
    const int n_max = 6 + trial;
    const int t = trial % (n_max + 1);
    const auto nu = wia::stationary_distribution(in.bs, in.m, in.p, ThresholdPolicy{t}, n_max).nu;
    const auto ref = oracle::stationary(oracle::threshold_chain(in.bs, in.m, in.p, t, n_max));
    double total = 0.0;
    for (int x = 0; x <= n_max; ++x) {
      CHECK(nu[static_cast<std::size_t>(x)] >= 0.0);
      CHECK(std::abs(nu[static_cast<std::size_t>(x)] - ref(x)) < 1e-10);
      total += nu[static_cast<std::size_t>(x)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("average cost f: trivial cases and submodularity") {
  const int n_max = 10;
  const BsParams bs{0.3, 0.2, 0.6, 2.0};
  const auto nu = wia::stationary_distribution(bs, 2, 0.4, ThresholdPolicy{n_max}, n_max).nu;
  double mean = 0.0;
  for (int x = 0; x <= n_max; ++x) mean += x * nu[static_cast<std::size_t>(x)];
  CHECK(wia::average_cost_f(bs, 2, 0.4, 9.0, ThresholdPolicy{n_max}, n_max) == doctest::Approx(2.0 * mean));
  CHECK(wia::average_cost_f(BsParams{0.3, 0.2, 0.6, 0.0}, 2, 0.4, 9.0, ThresholdPolicy{-1}, n_max) ==
        doctest::Approx(9.0));

  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = oracle::random_stable_instance(gen, 3);
    const double lams[] = {0.0, 2.0, 5.0, 11.0, 30.0};
    const int ts[] = {-1, 1, 3, 6, 9};
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b)
        for (int i = 0; i < 5; ++i)
          for (int j = i + 1; j < 5; ++j) {
            const double l2 = lams[a], l1 = lams[b];
            const ThresholdPolicy t2{ts[i]}, t1{ts[j]};
            const double lhs = wia::average_cost_f(in.bs, in.m, in.p, l1, t2, n_max) +
                               wia::average_cost_f(in.bs, in.m, in.p, l2, t1, n_max);
            const double rhs = wia::average_cost_f(in.bs, in.m, in.p, l1, t1, n_max) +
                               wia::average_cost_f(in.bs, in.m, in.p, l2, t2, n_max);
            CHECK(lhs >= rhs - 1e-9);
          }
  }
}

TEST_CASE("advantage h") {
  const BsParams bs{0.3, 0.2, 0.6, 1.5};
  const int n_max = 15;
  const double p = 0.35;
  const auto sol = wia::rvi_solve(bs, 2, p, 6.0, n_max);
  CHECK(wia::advantage_h(sol, bs, 2, p, 0) == doctest::Approx(p * (sol.v[1] - sol.v[0])).epsilon(1e-12));
  CHECK(wia::advantage_h(sol, bs, 2, p, 0) >= 0.0);
  for (int x = 0; x + 1 < n_max; ++x)
    CHECK(wia::advantage_h(sol, bs, 2, p, x + 1) >= wia::advantage_h(sol, bs, 2, p, x) - 1e-9);

  const auto zero = wia::rvi_solve(BsParams{0.3, 0.2, 0.6, 0.0}, 2, p, 0.0, n_max);
  for (int x = 0; x < n_max; ++x) CHECK(std::abs(wia::advantage_h(zero, bs, 2, p, x)) < 1e-12);

  CHECK_THROWS_AS(wia::advantage_h(sol, bs, 2, p, -1), std::out_of_range);
  CHECK_THROWS_AS(wia::advantage_h(sol, bs, 2, p, n_max), std::out_of_range);
}
