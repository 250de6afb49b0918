#include "mlabc/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mlabc/bench/csv.hpp"
#include "mlabc/error.hpp"

namespace mlabc::bench {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
    // accept 1e6-style integers as well
    if (v.find_first_of("eE.") != std::string::npos) {
      const double d = parse_real(v);
      if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) throw std::invalid_argument("frac");
      return static_cast<std::uint64_t>(d);
    }
    const auto x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_real(v);
  } catch (const ConfigError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

template <class T, class F>
std::string join_map(const std::vector<T>& xs, F f) {
  std::vector<std::string> parts;
  for (const auto& x : xs) parts.push_back(f(x));
  return join(parts);
}

void flatten(const nlohmann::json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  auto scalar = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_real(v.get<double>());
    throw ConfigError("config JSON: unsupported value " + v.dump());
  };
  if (j.is_array()) {
    std::vector<std::string> parts;
    for (const auto& e : j) {
      if (e.is_array()) {
        // matrix rows
        std::vector<std::string> row;
        for (const auto& x : e) row.push_back(scalar(x));
        parts.push_back(join(row, " "));
      } else {
        parts.push_back(scalar(e));
      }
    }
    // rows of a matrix are separated by ';'
    const bool matrix = !j.empty() && j.front().is_array();
    out[prefix] = matrix ? join(parts, ";") : join(parts);
    return;
  }
  out[prefix] = scalar(j);
}

}  // namespace

std::map<std::string, std::string> parse_flat_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(number) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (out.count(key)) throw ConfigError("config: key '" + key + "' given twice");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_flat_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON: top level must be an object");
  std::map<std::string, std::string> out;
  flatten(j, "", out);
  return out;
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& values,
                                 ExperimentConfig c) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto sizes = [](const std::string& k, const std::string& v) {
    std::vector<std::size_t> out;
    for (const auto& p : split_list(v)) out.push_back(static_cast<std::size_t>(to_u64(k, p)));
    return out;
  };
  auto reals = [](const std::string& k, const std::string& v) {
    std::vector<double> out;
    for (const auto& p : split_list(v)) out.push_back(to_real(k, p));
    return out;
  };
  const std::map<std::string, Setter> setters{
      {"name", [&](auto&, auto& v) { c.name = v; }},
      {"model", [&](auto&, auto& v) { c.model = v; }},
      {"sampler", [&](auto&, auto& v) { c.sampler = v; }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"replications", [&](auto& k, auto& v) { c.replications = to_u64(k, v); }},
      {"replication_seed", [&](auto& k, auto& v) { c.replication_seed = to_u64(k, v); }},
      {"workers", [&](auto& k, auto& v) { c.workers = static_cast<unsigned>(to_u64(k, v)); }},
      {"budget_cap", [&](auto& k, auto& v) { c.budget_cap = to_u64(k, v); }},
      {"samples", [&](auto& k, auto& v) { c.samples = to_u64(k, v); }},
      {"schedule.kind", [&](auto&, auto& v) { c.schedule.kind = schedule_kind_from_string(v); }},
      {"schedule.first", [&](auto& k, auto& v) { c.schedule.first = to_real(k, v); }},
      {"schedule.ratio", [&](auto& k, auto& v) { c.schedule.ratio = to_real(k, v); }},
      {"schedule.last", [&](auto& k, auto& v) { c.schedule.last = to_real(k, v); }},
      {"schedule.levels", [&](auto& k, auto& v) { c.schedule.levels = to_u64(k, v); }},
      {"schedule.values", [&](auto& k, auto& v) { c.schedule.values = reals(k, v); }},
      {"lattice.nodes", [&](auto& k, auto& v) { c.lattice_nodes = sizes(k, v); }},
      {"lattice.lo", [&](auto& k, auto& v) { c.lattice_lo = reals(k, v); }},
      {"lattice.hi", [&](auto& k, auto& v) { c.lattice_hi = reals(k, v); }},
      {"mlmc.allocations", [&](auto& k, auto& v) { c.allocations = sizes(k, v); }},
      {"mlmc.target_rmse", [&](auto& k, auto& v) { c.target_rmse = to_real(k, v); }},
      {"mlmc.scale_to_finest", [&](auto& k, auto& v) { c.scale_to_finest = to_bool(k, v); }},
      {"mlmc.trial_samples", [&](auto& k, auto& v) { c.trial_samples = to_u64(k, v); }},
      {"mlmc.min_samples", [&](auto& k, auto& v) { c.min_samples = to_u64(k, v); }},
      {"mlmc.trial_seed", [&](auto& k, auto& v) { c.trial_seed = to_u64(k, v); }},
      {"mlmc.coupling", [&](auto&, auto& v) { c.coupling = coupling_mode_from_string(v); }},
      {"mlmc.truncate_prior", [&](auto& k, auto& v) { c.truncate_prior = to_bool(k, v); }},
      {"kernel", [&](auto&, auto& v) { c.kernel = v; }},
      {"kernel.covariance",
       [&](auto& k, auto& v) {
         c.kernel_covariance.clear();
         for (const auto& row : split_list(v, ';')) {
           std::vector<double> r;
           for (const auto& x : split_list(row, ' ')) r.push_back(to_real(k, x));
           c.kernel_covariance.push_back(std::move(r));
         }
         c.kernel = "custom";
       }},
      {"mcmc.burn_in", [&](auto& k, auto& v) { c.burn_in = to_u64(k, v); }},
      {"data.file", [&](auto&, auto& v) { c.data_file = v; }},
      {"sis.s0", [&](auto& k, auto& v) { c.sis_s0 = static_cast<int>(to_u64(k, v)); }},
      {"sis.i0", [&](auto& k, auto& v) { c.sis_i0 = static_cast<int>(to_u64(k, v)); }},
      {"sis.data_seed", [&](auto& k, auto& v) { c.sis_data_seed = to_u64(k, v); }},
      {"tb.max_infections", [&](auto& k, auto& v) { c.tb_max_infections = static_cast<std::int64_t>(to_u64(k, v)); }},
      {"tb.subsample", [&](auto& k, auto& v) { c.tb_subsample = static_cast<int>(to_u64(k, v)); }},
      {"reference.kind", [&](auto&, auto& v) { c.reference_kind = v; }},
      {"reference.samples", [&](auto& k, auto& v) { c.reference_samples = to_u64(k, v); }},
      {"reference.seed", [&](auto& k, auto& v) { c.reference_seed = to_u64(k, v); }},
      {"reference.threshold", [&](auto& k, auto& v) { c.reference_threshold = to_real(k, v); }},
      {"reference.file", [&](auto&, auto& v) { c.reference_file = v; }},
      {"quadrature.fine_points", [&](auto& k, auto& v) { c.quadrature_fine_points = to_u64(k, v); }},
      {"quadrature.scan_points", [&](auto& k, auto& v) { c.quadrature_scan_points = to_u64(k, v); }},
      {"quadrature.tolerance", [&](auto& k, auto& v) { c.quadrature_tolerance = to_real(k, v); }},
      {"output.samples", [&](auto& k, auto& v) { c.write_samples = to_bool(k, v); }},
  };
  for (const auto& [key, value] : values) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (model != "sis" && model != "tb") throw ConfigError("model must be sis or tb");
  if (sampler != "rejection" && sampler != "mlmc" && sampler != "mcmc" && sampler != "smc") {
    throw ConfigError("sampler must be rejection, mlmc, mcmc or smc");
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  expand_schedule(schedule);
  const std::size_t k = model == "sis" ? 2 : 3;
  if (!lattice_nodes.empty() && lattice_nodes.size() != 1 && lattice_nodes.size() != k) {
    throw ConfigError("lattice.nodes: give one count or one per parameter");
  }
  for (auto n : lattice_nodes) {
    if (n < 2) throw ConfigError("lattice.nodes: at least 2 nodes per axis");
  }
  if ((!lattice_lo.empty() && lattice_lo.size() != k) || (!lattice_hi.empty() && lattice_hi.size() != k)) {
    throw ConfigError("lattice.lo / lattice.hi: one value per parameter");
  }
  for (std::size_t j = 0; j < std::min(lattice_lo.size(), lattice_hi.size()); ++j) {
    if (!(lattice_lo[j] < lattice_hi[j])) throw ConfigError("lattice.lo must be below lattice.hi");
  }
  if (sampler == "mlmc") {
    const std::size_t L = expand_schedule(schedule).size();
    if (!allocations.empty() && allocations.size() != L) {
      throw ConfigError("mlmc.allocations: one value per level");
    }
    if (allocations.empty() && !target_rmse && !scale_to_finest) {
      throw ConfigError("mlmc: give mlmc.allocations, mlmc.target_rmse or mlmc.scale_to_finest");
    }
    if (target_rmse && !(*target_rmse > 0.0)) throw ConfigError("mlmc.target_rmse must be > 0");
    if (trial_samples < 2) throw ConfigError("mlmc.trial_samples must be >= 2");
  }
  if (kernel != "naive" && kernel != "tuned" && kernel != "custom") {
    throw ConfigError("kernel must be naive, tuned or custom");
  }
  if (kernel == "custom") {
    if (kernel_covariance.size() != k) throw ConfigError("kernel.covariance: need k rows");
    for (const auto& r : kernel_covariance) {
      if (r.size() != k) throw ConfigError("kernel.covariance: need k columns");
    }
  } else if (model == "sis" && (sampler == "mcmc" || sampler == "smc")) {
    throw ConfigError("the naive/tuned kernels are for the tb model; give kernel.covariance for sis");
  }
  if (reference_kind != "auto" && reference_kind != "exact" && reference_kind != "rejection" &&
      reference_kind != "none") {
    throw ConfigError("reference.kind must be auto, exact, rejection or none");
  }
  if (reference_kind == "exact" && model != "sis") {
    throw ConfigError("reference.kind = exact is only available for the sis model");
  }
  if (reference_kind != "none" && reference_samples < 1) throw ConfigError("reference.samples must be >= 1");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  auto sz = [](std::size_t x) { return std::to_string(x); };
  o << "name = " << name << "\n";
  o << "model = " << model << "\n";
  o << "sampler = " << sampler << "\n";
  o << "seed = " << seed << "\n";
  o << "replications = " << replications << "\n";
  if (replication_seed) o << "replication_seed = " << *replication_seed << "\n";
  o << "workers = " << workers << "\n";
  o << "budget_cap = " << budget_cap << "\n";
  o << "samples = " << samples << "\n";
  if (sampler == "mcmc" || sampler == "smc") {
    if (kernel == "custom") {
      std::vector<std::string> rows;
      for (const auto& r : kernel_covariance) rows.push_back(join_map(r, format_real));
      std::string text;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string row = rows[i];
        std::replace(row.begin(), row.end(), ',', ' ');
        text += (i ? ";" : "") + row;
      }
      o << "kernel.covariance = " << text << "\n";
    } else {
      o << "kernel = " << kernel << "\n";
    }
    if (sampler == "mcmc") o << "mcmc.burn_in = " << burn_in << "\n";
  }
  if (!data_file.empty()) o << "data.file = " << data_file << "\n";
  if (model == "sis") {
    o << "sis.s0 = " << sis_s0 << "\nsis.i0 = " << sis_i0 << "\nsis.data_seed = " << sis_data_seed << "\n";
  } else {
    o << "tb.max_infections = " << tb_max_infections << "\ntb.subsample = " << tb_subsample << "\n";
  }
  o << "\n[schedule]\n";
  o << "kind = " << to_string(schedule.kind) << "\n";
  if (schedule.kind == ScheduleSpec::Kind::List) {
    o << "values = " << join_map(schedule.values, format_real) << "\n";
  } else {
    o << "first = " << format_real(schedule.first) << "\n";
    o << "levels = " << schedule.levels << "\n";
    if (schedule.kind == ScheduleSpec::Kind::Geometric) o << "ratio = " << format_real(schedule.ratio) << "\n";
    if (schedule.kind == ScheduleSpec::Kind::Recursive) o << "last = " << format_real(schedule.last) << "\n";
  }
  if (!lattice_nodes.empty() || !lattice_lo.empty() || !lattice_hi.empty()) {
    o << "\n[lattice]\n";
    if (!lattice_nodes.empty()) o << "nodes = " << join_map(lattice_nodes, sz) << "\n";
    if (!lattice_lo.empty()) o << "lo = " << join_map(lattice_lo, format_real) << "\n";
    if (!lattice_hi.empty()) o << "hi = " << join_map(lattice_hi, format_real) << "\n";
  }
  if (sampler == "mlmc") {
    o << "\n[mlmc]\n";
    if (!allocations.empty()) o << "allocations = " << join_map(allocations, sz) << "\n";
    if (target_rmse) o << "target_rmse = " << format_real(*target_rmse) << "\n";
    o << "scale_to_finest = " << (scale_to_finest ? "true" : "false") << "\n";
    o << "trial_samples = " << trial_samples << "\n";
    o << "min_samples = " << min_samples << "\n";
    o << "trial_seed = " << trial_seed << "\n";
    o << "coupling = " << to_string(coupling) << "\n";
    o << "truncate_prior = " << (truncate_prior ? "true" : "false") << "\n";
  }
  o << "\n[reference]\n";
  o << "kind = " << reference_kind << "\n";
  o << "samples = " << reference_samples << "\n";
  o << "seed = " << reference_seed << "\n";
  if (reference_threshold) o << "threshold = " << format_real(*reference_threshold) << "\n";
  if (!reference_file.empty()) o << "file = " << reference_file << "\n";
  o << "\n[quadrature]\n";
  o << "fine_points = " << quadrature_fine_points << "\n";
  o << "scan_points = " << quadrature_scan_points << "\n";
  o << "tolerance = " << format_real(quadrature_tolerance) << "\n";
  o << "\n[output]\nsamples = " << (write_samples ? "true" : "false") << "\n";
  return o.str();
}

ExperimentConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return config_from_map(parse_flat_json(text));
  return config_from_map(parse_flat_text(text));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mlabc::bench
