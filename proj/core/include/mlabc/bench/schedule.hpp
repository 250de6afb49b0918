#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mlabc::bench {

/// Threshold schedule as written in a config file.
///   geometric: eps_l = first * ratio^(1-l), l = 1..levels
///   recursive: eps_i = last + (eps_{i-1} - last) / 2, eps_1 = first, i = 2..levels
///   list:      the values as given
struct ScheduleSpec {
  enum class Kind { Geometric, Recursive, List };
  Kind kind = Kind::Geometric;
  double first = 75.0;
  double ratio = 2.0;
  double last = 0.0;
  std::size_t levels = 3;
  std::vector<double> values;
};

ScheduleSpec::Kind schedule_kind_from_string(const std::string& name);
const char* to_string(ScheduleSpec::Kind kind);

/// Throws ConfigError unless the result is positive and strictly decreasing.
std::vector<double> expand_schedule(const ScheduleSpec& spec);

}  // namespace mlabc::bench
