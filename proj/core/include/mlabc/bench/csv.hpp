#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mlabc/abc/rejection.hpp"
#include "mlabc/mlmc/lattice.hpp"

namespace mlabc::bench {

/// 17 significant digits: enough for any double to survive a round trip.
std::string format_real(double x);
double parse_real(const std::string& text);

/// A header plus string cells. Cells never contain commas or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ConfigError if absent
  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

/// One row per node: the node coordinates under the axis names, then value.
/// The lattice is recovered from the coordinates when reading.
CsvTable lattice_cdf_table(const LatticeCdf& cdf, const std::vector<std::string>& names);
LatticeCdf lattice_cdf_from_table(const CsvTable& table);

/// index, one column per parameter, discrepancy.
CsvTable samples_table(const SampleSet& samples, const std::vector<std::string>& names);
SampleSet samples_from_table(const CsvTable& table);

/// Long form: parameter, node, value.
CsvTable marginals_table(const std::vector<MarginalCdf>& marginals,
                         const std::vector<std::string>& names);
std::vector<MarginalCdf> marginals_from_table(const CsvTable& table,
                                              const std::vector<std::string>& names);

void save_lattice_cdf(const LatticeCdf& cdf, const std::vector<std::string>& names,
                      const std::filesystem::path& path);
LatticeCdf load_lattice_cdf(const std::filesystem::path& path);

}  // namespace mlabc::bench
