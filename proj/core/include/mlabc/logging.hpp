#pragma once

#include <functional>
#include <string>

namespace mlabc {

using WarningSink = std::function<void(const std::string&)>;

/// Replaces the warning sink (stderr by default). Passing an empty function
/// silences warnings. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace mlabc
