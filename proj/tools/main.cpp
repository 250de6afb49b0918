#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlabc/bench/config.hpp"
#include "mlabc/bench/csv.hpp"
#include "mlabc/bench/experiment.hpp"
#include "mlabc/bench/problem.hpp"
#include "mlabc/bench/studies.hpp"
#include "mlabc/error.hpp"

namespace fs = std::filesystem;
using namespace mlabc;
using namespace mlabc::bench;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> budget_cap;
  std::optional<std::uint64_t> replication_seed;
  std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  cmd->add_option("--budget-cap", o.budget_cap, "Simulation budget per run");
  cmd->add_option("--out", o.out, "Output directory");
}

ExperimentConfig load_with_overrides(const fs::path& path, const Overrides& o) {
  ExperimentConfig c = load_config(path);
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.budget_cap) c.budget_cap = *o.budget_cap;
  if (o.replication_seed) c.replication_seed = *o.replication_seed;
  c.validate();
  return c;
}

void print_table(const CsvTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) std::cout << (i ? "," : "") << t.header[i];
  std::cout << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Monte Carlo ABC experiments"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_config, preset;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file or a preset");
  run->add_option("config", run_config, "Config file (key = value or JSON)");
  run->add_option("--preset", preset, "Run a named preset instead of a config file");
  run->add_option("--replication-seed", run_o.replication_seed, "Rerun one replication from its sub-seed");
  add_common(run, run_o);

  Overrides ref_o;
  std::string ref_config;
  auto* ref = app.add_subcommand("reference", "Build (or load from cache) the reference CDF of a config");
  ref->add_option("config", ref_config, "Config file")->required();
  add_common(ref, ref_o);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Aggregate every report.csv under a directory");
  report->add_option("dir", report_dir, "Results directory")->required();

  auto* list = app.add_subcommand("presets", "List the named presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (preset.empty() == run_config.empty()) {
        std::cerr << "run: give either a config file or --preset\n";
        return 2;
      }
      if (!preset.empty()) {
        const fs::path out = run_o.out.empty() ? fs::path("results") / preset : fs::path(run_o.out);
        run_preset(preset, out, run_o.seed, run_o.workers, run_o.budget_cap);
        print_table(aggregate_reports(out));
        std::cout << "wrote " << out.string() << "\n";
        return 0;
      }
      const ExperimentConfig c = load_with_overrides(run_config, run_o);
      const fs::path out = run_o.out.empty() ? fs::path("results") / c.name : fs::path(run_o.out);
      const RunReport r = run_experiment(c, out, fs::path(run_config).parent_path());
      print_table(report_table(r));
      std::cout << "rmse," << format_real(r.rmse) << "\nmean_n_s," << format_real(r.mean_n_s) << "\n";
      return r.failures == 0 ? 0 : 1;
    }
    if (*ref) {
      const ExperimentConfig c = load_with_overrides(ref_config, ref_o);
      const fs::path base = fs::path(ref_config).parent_path();
      const Problem p = build_problem(c, base);
      const LatticeCdf cdf = build_reference(c, p, base);
      const fs::path out = ref_o.out.empty() ? fs::path("results") / c.name : fs::path(ref_o.out);
      save_lattice_cdf(cdf, p.names, out / "reference.csv");
      std::cout << "wrote " << (out / "reference.csv").string() << "\n";
      return 0;
    }
    if (*report) {
      const CsvTable t = aggregate_reports(report_dir);
      write_csv(t, fs::path(report_dir) / "summary.csv");
      print_table(t);
      return 0;
    }
    if (*list) {
      for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
