#pragma once

#include <filesystem>
#include <vector>

namespace mlabc::detail {

/// Reads a comma-separated numeric table with exactly `columns` fields per row.
/// Blank lines, '#' comments and a single non-numeric header line are skipped.
std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path,
                                                   std::size_t columns);

}  // namespace mlabc::detail
