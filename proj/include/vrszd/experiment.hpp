#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrszd/optimizers.hpp"
#include "vrszd/problems.hpp"
#include "vrszd/rng.hpp"

namespace vrszd {

enum class Method { VrSzd, Rspgf, ZoPsvrgRand, ZoPsvrgCoord };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BetaSpec {
  BetaSchedule::Kind kind = BetaSchedule::Kind::Constant;
  double value = 1e-5;       // constant beta, or the numerator of power_decay
  double alpha = 0.75;       // power_decay exponent, or the geometric base
  double eta0 = 1e-3;        // geometric_pl
  double eta_power = 0.75;   // geometric_pl

  BetaSchedule build(std::size_t d, std::size_t m) const;
};

struct AlgorithmEntry {
  std::string label;
  Method method = Method::VrSzd;
  std::vector<double> gammas;
  std::vector<std::size_t> ls{1};
  std::vector<std::size_t> bs{1};
  std::vector<std::size_t> ms{1};
  BetaSpec beta;
};

struct ProblemSpec {
  enum class Kind { Lasso, Logistic } kind = Kind::Lasso;
  // LASSO
  std::size_t d = 50;
  double cond_min = 1.0;
  double cond_max = 3.1622776601683795;
  std::uint64_t seed = 0;
  // LASSO and logistic
  double lambda = 1e-5;
  // Logistic
  std::string dataset;
  LogisticLink link = LogisticLink::Literal;
  bool standardize = true;
};

struct ExperimentSpec {
  std::string name = "experiment";
  ProblemSpec problem;
  std::vector<AlgorithmEntry> algorithms;
  std::uint64_t budget = 1000000;
  std::optional<std::size_t> outer_iterations;
  std::size_t repeats = 10;
  Seed seed_base{0};
  std::string x0 = "ones";  // "ones" or "zeros"
  std::size_t curve_points = 200;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);
// Relative dataset paths in the file resolve against the file's directory.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

Problem build_problem(const ProblemSpec& spec);
Vector initial_point(const ExperimentSpec& spec, std::size_t d);

/// One point of an algorithm's hyperparameter grid.
struct Cell {
  std::size_t index;   // global position in enumeration order
  std::size_t entry;   // index into ExperimentSpec::algorithms
  std::string label;
  Method method;
  double gamma;
  std::size_t l, b, m;
  BetaSpec beta;
};

// Cartesian product m x l x b x gamma per entry. RSPGF ignores m and b,
// ZO-PSVRG+ ignores l (1 for RandSGE, d for CoordSGE).
std::vector<Cell> enumerate_cells(const ExperimentSpec& spec, std::size_t d);

OptimizerConfig make_config(const ExperimentSpec& spec, const Cell& cell, std::size_t d, Seed seed);
RunTrace run_cell(const Problem& p, const Cell& cell, const OptimizerConfig& cfg, std::span<const double> x0);

/// Per-checkpoint CSV record; field order is the CSV column order.
struct ResultRow {
  std::string algorithm;
  std::size_t m, l, b;
  double gamma;
  double beta;
  std::uint64_t seed;
  std::uint64_t evals;
  double f_minus_min;
  std::optional<double> grad_map_norm_sq;
  std::size_t tau, k;
};

inline constexpr const char* kResultHeader =
    "algorithm,m,l,b,gamma,beta,seed,evals,F_minus_min,grad_map_norm_sq,tau,k";

std::string format_double(double v);
std::string format_row(const ResultRow& row);

struct CellResult {
  Cell cell;
  std::vector<std::uint64_t> seeds;
  std::vector<RunTrace> traces;
  std::vector<double> final_gaps;  // raw F(x_out) - min F
  std::vector<double> scores;      // clipped to the initial gap on divergence
  double mean_score = 0.0;
  double std_score = 0.0;
  std::size_t diverged = 0;
};

// Divergent runs (non-finite or worse than the start) score as the initial gap.
double clipped_score(double final_gap, double initial_gap);

struct BestChoice {
  std::string label;
  std::size_t m;  // 0 when the best is taken over every m of the entry
  std::size_t cell;
  double mean_score;
};

struct ExperimentResult {
  double initial_gap = 0.0;
  double min_value = 0.0;
  std::vector<CellResult> cells;
  std::vector<BestChoice> best_per_m;      // per (label, m)
  std::vector<BestChoice> best_per_label;  // per label
};

// Runs every (cell, repeat) job on a pool of `workers` threads. Results do not
// depend on the worker count.
ExperimentResult grid_search(const ExperimentSpec& spec, std::size_t workers = 1);

// grid_search plus runs.csv, summary.csv, best.csv and curves/<label>.csv in out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                std::size_t workers = 1);

void write_runs_csv(const ExperimentResult& result, const ExperimentSpec& spec, std::ostream& out);
void write_summary_csv(const ExperimentResult& result, std::ostream& out);
void write_best_csv(const ExperimentResult& result, std::ostream& out);

}  // namespace vrszd
