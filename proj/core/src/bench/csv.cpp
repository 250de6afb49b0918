#include "mlabc/bench/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mlabc/error.hpp"

namespace mlabc::bench {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Axis from sorted distinct coordinates. Regular spacing is checked loosely
// because the coordinates went through decimal text.
LatticeAxis axis_from_coordinates(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ConfigError("lattice CSV: every axis needs at least two nodes");
  LatticeAxis axis{xs.front(), xs.back(), xs.size()};
  const double h = axis.spacing();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - axis.node(i)) > 1e-9 * std::max(1.0, std::abs(h) * xs.size())) {
      throw ConfigError("lattice CSV: axis nodes are not regularly spaced");
    }
  }
  return axis;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + text + "'");
  return x;
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV column '" + name + "' missing");
  return static_cast<std::size_t>(it - header.begin());
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  if (!out) throw ConfigError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ConfigError(path.string() + ": row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (first) throw ConfigError(path.string() + ": empty CSV");
  return t;
}

CsvTable lattice_cdf_table(const LatticeCdf& cdf, const std::vector<std::string>& names) {
  const Lattice& lat = cdf.lattice;
  if (names.size() != lat.dimension()) throw InvalidArgument("lattice_cdf_table: name count");
  CsvTable t;
  t.header = names;
  t.header.push_back("value");
  t.rows.reserve(lat.size());
  for (std::size_t f = 0; f < lat.size(); ++f) {
    std::vector<std::string> row;
    for (double x : lat.node(f)) row.push_back(format_real(x));
    row.push_back(format_real(cdf.values[f]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

LatticeCdf lattice_cdf_from_table(const CsvTable& table) {
  if (table.header.size() < 2 || table.header.back() != "value") {
    throw ConfigError("lattice CSV: expected coordinate columns followed by 'value'");
  }
  const std::size_t k = table.header.size() - 1;
  std::vector<std::vector<double>> coords(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (const auto& r : table.rows) coords[j].push_back(parse_real(r[j]));
    std::sort(coords[j].begin(), coords[j].end());
    coords[j].erase(std::unique(coords[j].begin(), coords[j].end()), coords[j].end());
  }
  std::vector<LatticeAxis> axes;
  for (const auto& c : coords) axes.push_back(axis_from_coordinates(c));
  LatticeCdf cdf;
  cdf.lattice = Lattice(axes);
  if (table.rows.size() != cdf.lattice.size()) throw ConfigError("lattice CSV: node count mismatch");
  cdf.values.resize(cdf.lattice.size());
  // Rows are written in flat order; keep reading tolerant of reordering anyway.
  for (const auto& r : table.rows) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& c = coords[j];
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(c.begin(), c.end(), parse_real(r[j])) - c.begin());
      flat += idx * cdf.lattice.stride(j);
    }
    cdf.values[flat] = parse_real(r[k]);
  }
  return cdf;
}

CsvTable samples_table(const SampleSet& samples, const std::vector<std::string>& names) {
  CsvTable t;
  t.header.push_back("index");
  t.header.insert(t.header.end(), names.begin(), names.end());
  t.header.push_back("discrepancy");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (double x : samples.samples[i]) row.push_back(format_real(x));
    row.push_back(i < samples.discrepancies.size() ? format_real(samples.discrepancies[i]) : "nan");
    t.rows.push_back(std::move(row));
  }
  return t;
}

SampleSet samples_from_table(const CsvTable& table) {
  if (table.header.size() < 3 || table.header.front() != "index" ||
      table.header.back() != "discrepancy") {
    throw ConfigError("samples CSV: expected index, parameters..., discrepancy");
  }
  SampleSet s;
  const std::size_t k = table.header.size() - 2;
  for (const auto& r : table.rows) {
    ParameterVector p(k);
    for (std::size_t j = 0; j < k; ++j) p[j] = parse_real(r[j + 1]);
    s.samples.push_back(std::move(p));
    s.discrepancies.push_back(parse_real(r.back()));
  }
  return s;
}

CsvTable marginals_table(const std::vector<MarginalCdf>& marginals,
                         const std::vector<std::string>& names) {
  CsvTable t{{"parameter", "node", "value"}, {}};
  for (const auto& m : marginals) {
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      t.rows.push_back({names.at(m.axis), format_real(m.nodes[i]), format_real(m.values[i])});
    }
  }
  return t;
}

std::vector<MarginalCdf> marginals_from_table(const CsvTable& table,
                                              const std::vector<std::string>& names) {
  std::vector<MarginalCdf> out(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) out[j].axis = j;
  const std::size_t pc = table.column("parameter"), nc = table.column("node"), vc = table.column("value");
  for (const auto& r : table.rows) {
    auto it = std::find(names.begin(), names.end(), r[pc]);
    if (it == names.end()) throw ConfigError("marginals CSV: unknown parameter " + r[pc]);
    auto& m = out[static_cast<std::size_t>(it - names.begin())];
    m.nodes.push_back(parse_real(r[nc]));
    m.values.push_back(parse_real(r[vc]));
  }
  return out;
}

void save_lattice_cdf(const LatticeCdf& cdf, const std::vector<std::string>& names,
                      const std::filesystem::path& path) {
  write_csv(lattice_cdf_table(cdf, names), path);
}

LatticeCdf load_lattice_cdf(const std::filesystem::path& path) {
  return lattice_cdf_from_table(read_csv(path));
}

}  // namespace mlabc::bench
