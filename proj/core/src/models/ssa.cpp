#include "mlabc/models/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlabc/error.hpp"

namespace mlabc {

const State& Trajectory::state_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return states[i];
}

Trajectory ssa_simulate(const ReactionNetwork& network, std::span<const double> theta,
                        State initial, const StopCondition& stop, Rng& rng) {
  if (initial.size() != network.species.size()) {
    throw InvalidArgument("ssa_simulate: initial state has wrong number of species");
  }
  Trajectory path;
  path.times.push_back(0.0);
  path.states.push_back(initial);

  State x = std::move(initial);
  std::vector<double> hazards(network.reactions.size());
  double t = 0.0;
  for (;;) {
    if (path.events >= stop.max_events) {
      path.end = TrajectoryEnd::EventCap;
      return path;
    }
    double total = 0.0;
    for (std::size_t r = 0; r < hazards.size(); ++r) {
      double h = network.reactions[r].hazard(x, theta);
      if (!(h >= 0.0)) {
        throw InvalidModel("ssa_simulate: reaction '" + network.reactions[r].name +
                           "' has invalid hazard " + std::to_string(h));
      }
      hazards[r] = h;
      total += h;
    }
    if (total == 0.0) {
      path.end = TrajectoryEnd::Absorbed;
      return path;
    }
    t += rng.exponential(total);
    if (t > stop.final_time) {
      path.end = TrajectoryEnd::FinalTime;
      return path;
    }
    double target = rng.uniform() * total;
    std::size_t r = 0;
    for (; r + 1 < hazards.size(); ++r) {
      if (target < hazards[r]) break;
      target -= hazards[r];
    }
    // Roundoff in the walk can land on a zero-hazard reaction; step back.
    while (hazards[r] == 0.0) --r;
    const State& change = network.reactions[r].change;
    for (std::size_t s = 0; s < x.size(); ++s) x[s] += change[s];
    ++path.events;
    path.times.push_back(t);
    path.states.push_back(x);
  }
}

}  // namespace mlabc
