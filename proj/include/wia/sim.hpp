#pragma once

#include <span>
#include <vector>

#include "wia/model.hpp"
#include "wia/policy.hpp"
#include "wia/rng.hpp"

namespace wia {

struct UserRecord {
  long arrival_slot = 0;        // slot in which the user was admitted
  long departure_minislot = 0;  // slot * M + position (1-based) within the slot

  /// Mini-slots from mini-slot 1 of arrival_slot + 1 through the departure, inclusive.
  long delay(int m) const { return departure_minislot - (arrival_slot + 1) * static_cast<long>(m); }
};

struct SimOptions {
  bool record_states = false;  // keep the slot-start state of every BS
};

struct SimMetrics {
  double avg_cost = 0.0;   // mean slot cost over the trailing measure window
  double avg_delay = 0.0;  // mean delay of completed users, in mini-slots
  double jfi = 1.0;
  bool jfi_defined = false;  // false when no user completed (jfi reported as 1)

  long arrivals = 0;
  long admitted = 0;
  long dropped = 0;  // arrivals that found every BS full
  long completed = 0;
  long still_associated = 0;

  std::vector<double> cost_series;  // sum_i C_i X_n^i for every slot n
  std::vector<double> delays;       // per completed user, in departure order
  std::vector<int> state_trace;     // horizon x K, row-major; empty unless requested
};

/// Jain's fairness index (sum d)^2 / (Q sum d^2). Throws on empty input or
/// when every delay is zero.
double jfi(std::span<const double> delays);

/// Serves one slot of an x-user BS whose channel state is already drawn: in
/// each of the M mini-slots a nonempty BS loses one user with probability
/// `prob`. on_departure(position) is called with the 1-based mini-slot.
/// Returns the number of departures.
template <typename OnDeparture>
int serve_minislots(int x, double prob, int m, Rng& rng, OnDeparture&& on_departure) {
  int departed = 0;
  for (int pos = 1; pos <= m; ++pos) {
    if (x - departed == 0) break;
    if (rng.bernoulli(prob)) {
      ++departed;
      on_departure(pos);
    }
  }
  return departed;
}

/// Jam draw followed by serve_minislots: one slot's departures at a fixed state.
int draw_slot_departures(int x, const BsParams& params, int m, Rng& rng);

/// Simulates config.horizon slots from all-empty BSs with seed config.seed.
///
/// Draw order within a slot: arrival; policy tie-break (if any); jam flag of
/// each BS in index order; mini-slot departures of each BS in index order.
/// Slot cost uses slot-start states. An admitted user joins its BS at the end
/// of the slot and leaves in FIFO order.
SimMetrics run(const NetworkConfig& config, const PolicyKind& kind, const SimOptions& opts = {});

}  // namespace wia
