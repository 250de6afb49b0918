#include "mlabc/bench/schedule.hpp"

#include <cmath>

#include "mlabc/error.hpp"
#include "mlabc/mlmc/allocation.hpp"

namespace mlabc::bench {

ScheduleSpec::Kind schedule_kind_from_string(const std::string& name) {
  if (name == "geometric") return ScheduleSpec::Kind::Geometric;
  if (name == "recursive") return ScheduleSpec::Kind::Recursive;
  if (name == "list") return ScheduleSpec::Kind::List;
  throw ConfigError("unknown schedule kind '" + name + "' (geometric, recursive, list)");
}

const char* to_string(ScheduleSpec::Kind kind) {
  switch (kind) {
    case ScheduleSpec::Kind::Geometric: return "geometric";
    case ScheduleSpec::Kind::Recursive: return "recursive";
    case ScheduleSpec::Kind::List: return "list";
  }
  return "?";
}

std::vector<double> expand_schedule(const ScheduleSpec& spec) {
  std::vector<double> eps;
  switch (spec.kind) {
    case ScheduleSpec::Kind::Geometric:
      if (spec.levels < 1) throw ConfigError("schedule: levels must be >= 1");
      for (std::size_t l = 1; l <= spec.levels; ++l) {
        eps.push_back(spec.first * std::pow(spec.ratio, 1.0 - static_cast<double>(l)));
      }
      break;
    case ScheduleSpec::Kind::Recursive:
      if (spec.levels < 2) throw ConfigError("schedule: recursive needs at least two levels");
      eps.push_back(spec.first);
      for (std::size_t i = 2; i < spec.levels; ++i) {
        eps.push_back(spec.last + (eps.back() - spec.last) / 2.0);
      }
      eps.push_back(spec.last);  // the recursion's fixed point, reached at i = T
      break;
    case ScheduleSpec::Kind::List:
      eps = spec.values;
      break;
  }
  validate_thresholds(eps);
  return eps;
}

}  // namespace mlabc::bench
