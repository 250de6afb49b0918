#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mlabc/random.hpp"

namespace mlabc {

using State = std::vector<std::int64_t>;

/// Hazard of one reaction given the current state and the model parameters.
using HazardFn = std::function<double(std::span<const std::int64_t>, std::span<const double>)>;

struct Reaction {
  std::string name;
  State change;
  HazardFn hazard;
};

/// A set of reactions over named species, simulated exactly by ssa_simulate.
struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
};

/// The simulation ends at whichever limit is hit first. Reaching a state where
/// every hazard is zero also ends it.
struct StopCondition {
  double final_time = std::numeric_limits<double>::infinity();
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
};

enum class TrajectoryEnd { FinalTime, EventCap, Absorbed };

/// Piecewise-constant path: states[i] holds on [times[i], times[i+1]).
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::uint64_t events = 0;
  TrajectoryEnd end = TrajectoryEnd::FinalTime;

  /// State occupied at time t (t >= 0).
  const State& state_at(double t) const;
};

/// Gillespie direct method. Throws InvalidModel if a hazard is negative or NaN.
Trajectory ssa_simulate(const ReactionNetwork& network, std::span<const double> theta,
                        State initial, const StopCondition& stop, Rng& rng);

}  // namespace mlabc
