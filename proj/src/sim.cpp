#include "wia/sim.hpp"

#include <deque>
#include <stdexcept>

namespace wia {

double jfi(std::span<const double> delays) {
  if (delays.empty()) throw std::invalid_argument("jfi: no delays");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double d : delays) {
    if (d < 0.0) throw std::invalid_argument("jfi: negative delay");
    sum += d;
    sum_sq += d * d;
  }
  if (sum_sq == 0.0) throw std::invalid_argument("jfi: all delays are zero");
  return sum * sum / (static_cast<double>(delays.size()) * sum_sq);
}

int draw_slot_departures(int x, const BsParams& params, int m, Rng& rng) {
  const bool jammed = rng.bernoulli(params.q);
  return serve_minislots(x, jammed ? params.r : params.r_prime, m, rng, [](int) {});
}

SimMetrics run(const NetworkConfig& config, const PolicyKind& kind, const SimOptions& opts) {
  validate(config);
  if (kind.name == PolicyName::whittle && !kind.table) throw std::invalid_argument("run: whittle policy needs an index table");

  const auto k = static_cast<std::size_t>(config.k());
  const long m = config.m;
  Rng rng(config.seed);
  std::vector<int> x(k, 0);
  std::vector<std::deque<long>> queues(k);  // arrival slots, FIFO
  std::vector<char> jammed(k, 0);

  SimMetrics out;
  out.cost_series.reserve(static_cast<std::size_t>(config.horizon));
  if (opts.record_states) out.state_trace.reserve(static_cast<std::size_t>(config.horizon) * k);

  for (long slot = 0; slot < config.horizon; ++slot) {
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) cost += config.bs[i].c * x[i];
    out.cost_series.push_back(cost);
    if (opts.record_states) out.state_trace.insert(out.state_trace.end(), x.begin(), x.end());

    int chosen = -1;
    if (rng.bernoulli(config.p)) {
      ++out.arrivals;
      if (const auto d = decide(kind, x, config, rng)) chosen = d->bs_id;
      else ++out.dropped;
    }

    for (std::size_t i = 0; i < k; ++i) jammed[i] = rng.bernoulli(config.bs[i].q) ? 1 : 0;

    for (std::size_t i = 0; i < k; ++i) {
      const BsParams& bs = config.bs[i];
      const int departed = serve_minislots(x[i], jammed[i] ? bs.r : bs.r_prime, config.m, rng, [&](int pos) {
        const UserRecord user{queues[i].front(), slot * m + pos};
        queues[i].pop_front();
        out.delays.push_back(static_cast<double>(user.delay(config.m)));
      });
      x[i] -= departed;
    }

    if (chosen >= 0) {
      ++x[static_cast<std::size_t>(chosen)];
      queues[static_cast<std::size_t>(chosen)].push_back(slot);
      ++out.admitted;
    }
  }

  double window_sum = 0.0;
  for (std::size_t n = static_cast<std::size_t>(config.horizon - config.measure_window); n < out.cost_series.size(); ++n)
    window_sum += out.cost_series[n];
  out.avg_cost = window_sum / static_cast<double>(config.measure_window);

  out.completed = static_cast<long>(out.delays.size());
  for (const auto& q : queues) out.still_associated += static_cast<long>(q.size());
  if (out.completed > 0) {
    double total = 0.0;
    for (double d : out.delays) total += d;
    out.avg_delay = total / static_cast<double>(out.completed);
    out.jfi = jfi(out.delays);
    out.jfi_defined = true;
  }
  return out;
}

}  // namespace wia
