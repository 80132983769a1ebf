// Benchmark harness: run experiment specs, grid searches and the acceptance suite.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "acceptance/criteria.hpp"
#include "vrszd/experiment.hpp"

namespace {

using namespace vrszd;

void print_best(const ExperimentResult& r) {
  std::printf("initial gap F(x0) - min F = %.6g\n", r.initial_gap);
  std::printf("%-20s %6s %6s %4s %4s %10s %14s\n", "algorithm", "scope", "m", "l", "b", "gamma", "mean_final");
  auto row = [&](const BestChoice& b) {
    const Cell& c = r.cells[b.cell].cell;
    const std::string scope = b.m == 0 ? "all" : std::to_string(b.m);
    std::printf("%-20s %6s %6zu %4zu %4zu %10.4g %14.6g\n", b.label.c_str(), scope.c_str(), c.m, c.l, c.b,
                c.gamma, b.mean_score);
  };
  for (const BestChoice& b : r.best_per_m) row(b);
  for (const BestChoice& b : r.best_per_label) row(b);
}

ExperimentSpec load_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  ExperimentSpec spec = load_experiment_spec(path);
  if (seed) spec.seed_base = Seed{*seed};
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VR-SZD zeroth-order benchmark harness"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::vector<int> only;

  CLI::App* run = app.add_subcommand("run", "Run every grid cell and write runs/summary/best/curves CSVs");
  run->add_option("spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override seed_base");

  CLI::App* grid = app.add_subcommand("grid", "Grid search; prints the best cell per algorithm and m");
  grid->add_option("spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", out_dir, "Also write summary.csv and best.csv here");
  grid->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--seed", seed, "Override seed_base");

  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("--only", only, "Criterion ids to run (default: all)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentSpec spec = load_with_seed(spec_path, seed);
      const ExperimentResult r = run_experiment(spec, out_dir, workers);
      print_best(r);
      std::printf("wrote %s\n", out_dir.c_str());
    } else if (*grid) {
      const ExperimentSpec spec = load_with_seed(spec_path, seed);
      const ExperimentResult r = grid_search(spec, workers);
      print_best(r);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv", std::ios::binary);
        std::ofstream best(std::filesystem::path(out_dir) / "best.csv", std::ios::binary);
        if (!summary || !best) throw std::runtime_error("cannot write to '" + out_dir + "'");
        write_summary_csv(r, summary);
        write_best_csv(r, best);
      }
    } else if (*verify) {
      return acceptance::run_criteria(only) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench: %s\n", e.what());
    return 1;
  }
  return 0;
}
