#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "vrszd/error.hpp"
#include "vrszd/experiment.hpp"

using namespace vrszd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("VRSZD_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "vrszd_test";
  dir /= name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmallSpec = R"({
  "name": "small",
  "problem": {"type": "lasso", "d": 8, "lambda": 1e-5, "seed": 3},
  "budget": 4000,
  "repeats": 2,
  "seed_base": 11,
  "curve_points": 20,
  "algorithms": [
    {"label": "vr", "method": "vr_szd", "gamma": [0.001, 0.01], "l": [1, 4], "m": 5},
    {"label": "rs", "method": "rspgf", "gamma": 0.01, "l": [2]},
    {"label": "rand", "method": "zo_psvrg_rand", "gamma": 0.01, "b": [1, 2], "m": 5}
  ]
})";

}  // namespace

TEST_CASE("spec parsing with scalars and lists") {
  const ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  CHECK(spec.name == "small");
  CHECK(spec.budget == 4000);
  CHECK(spec.repeats == 2);
  CHECK(spec.seed_base.value == 11);
  REQUIRE(spec.algorithms.size() == 3);
  CHECK(spec.algorithms[0].gammas == std::vector<double>{0.001, 0.01});
  CHECK(spec.algorithms[0].ms == std::vector<std::size_t>{5});
  CHECK(spec.algorithms[1].method == Method::Rspgf);
  CHECK(spec.problem.d == 8);
}

TEST_CASE("malformed specs are rejected") {
  CHECK_THROWS_AS(parse_experiment_spec("{"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"problem": {"type": "lasso"}, "algorithms": []})"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"problem": {"type": "lasso"},
      "algorithms": [{"method": "vr_szd"}]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"problem": {"type": "lasso"},
      "algorithms": [{"method": "nope", "gamma": 1}]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"problem": {"type": "lasso"}, "repeats": 0,
      "algorithms": [{"method": "rspgf", "gamma": 1}]})"),
                  InvalidArgument);
}

TEST_CASE("comparison grid enumerates 16 cells per m") {
  ExperimentSpec spec;
  AlgorithmEntry a;
  a.label = "vr";
  a.method = Method::VrSzd;
  a.gammas = {0.001, 0.01, 0.1, 1.0};
  a.ls = {1, 10, 25, 50};
  a.ms = {50, 100, 150};
  spec.algorithms.push_back(a);
  const auto cells = enumerate_cells(spec, 50);
  CHECK(cells.size() == 48);
  std::map<std::size_t, int> per_m;
  for (const Cell& c : cells) ++per_m[c.m];
  for (auto [m, count] : per_m) CHECK(count == 16);

  spec.algorithms[0].method = Method::ZoPsvrgRand;
  for (const Cell& c : enumerate_cells(spec, 50)) CHECK(c.l == 1);
  spec.algorithms[0].method = Method::ZoPsvrgCoord;
  for (const Cell& c : enumerate_cells(spec, 50)) CHECK(c.l == 50);
  spec.algorithms[0].method = Method::Rspgf;
  CHECK(enumerate_cells(spec, 50).size() == 16);

  spec.algorithms[0].method = Method::VrSzd;
  spec.algorithms[0].ls = {60};
  CHECK_THROWS_AS(enumerate_cells(spec, 50), InvalidArgument);
}

TEST_CASE("clipping rule") {
  CHECK(clipped_score(0.5, 2.0) == 0.5);
  CHECK(clipped_score(3.0, 2.0) == 2.0);
  CHECK(clipped_score(std::nan(""), 2.0) == 2.0);
  CHECK(clipped_score(INFINITY, 2.0) == 2.0);
}

TEST_CASE("row formatting") {
  const ResultRow row{"vr", 5, 2, 1, 0.01, 1e-5, 42, 100, 0.25, std::nullopt, 3, 0};
  CHECK(format_row(row) == "vr,5,2,1,0.01,1.0000000000000001e-05,42,100,0.25,,3,0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("single-cell grid returns that cell") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.algorithms.resize(1);
  spec.algorithms[0].gammas = {0.01};
  spec.algorithms[0].ls = {4};
  const ExperimentResult r = grid_search(spec);
  REQUIRE(r.cells.size() == 1);
  REQUIRE(r.best_per_label.size() == 1);
  CHECK(r.best_per_label[0].cell == 0);
}

TEST_CASE("divergent stepsize loses the grid search") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.algorithms.resize(1);
  spec.algorithms[0].gammas = {0.001, 1.0};
  spec.algorithms[0].ls = {4};
  const ExperimentResult r = grid_search(spec);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[1].mean_score == r.initial_gap);
  CHECK(r.cells[1].diverged == spec.repeats);
  CHECK(r.cells[r.best_per_label[0].cell].cell.gamma == 0.001);
}

TEST_CASE("run_experiment output is deterministic and self-consistent") {
  const ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  const fs::path a = scratch("a"), b = scratch("b"), c = scratch("c");
  const ExperimentResult ra = run_experiment(spec, a, 1);
  run_experiment(spec, b, 1);
  run_experiment(spec, c, 3);
  for (const char* f : {"runs.csv", "summary.csv", "best.csv", "curves/vr.csv", "curves/rs.csv", "curves/rand.csv"}) {
    CAPTURE(f);
    const std::string first = slurp(a / f);
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(b / f));
    CHECK(first == slurp(c / f));
  }

  // Recompute the summary from runs.csv: the final row of each (cell, seed) is the output point.
  const oracle::Csv runs = oracle::read_csv((a / "runs.csv").string());
  CHECK(runs.header.size() == 12);
  const oracle::Csv summary = oracle::read_csv((a / "summary.csv").string());
  const std::size_t alg = runs.column("algorithm"), m = runs.column("m"), l = runs.column("l"),
                    bcol = runs.column("b"), gamma = runs.column("gamma"), seed = runs.column("seed"),
                    gap = runs.column("F_minus_min");
  std::map<std::string, std::map<std::string, double>> finals;
  for (const auto& row : runs.rows) {
    const std::string key = row[alg] + "|" + row[m] + "|" + row[l] + "|" + row[bcol] + "|" + row[gamma];
    finals[key][row[seed]] = std::stod(row[gap]);
  }
  REQUIRE(summary.rows.size() == ra.cells.size());
  for (const auto& row : summary.rows) {
    const std::string key = row[summary.column("algorithm")] + "|" + row[summary.column("m")] + "|" +
                            row[summary.column("l")] + "|" + row[summary.column("b")] + "|" +
                            row[summary.column("gamma")];
    REQUIRE(finals.count(key) == 1);
    double mean = 0.0;
    for (auto [s, v] : finals[key]) mean += clipped_score(v, ra.initial_gap);
    mean /= static_cast<double>(finals[key].size());
    CHECK(std::abs(mean - std::stod(row[summary.column("mean_final")])) <= 1e-12 * (1.0 + std::abs(mean)));
  }

  for (const auto& row : runs.rows) CHECK(std::stod(row[gap]) >= -1e-9);
}

TEST_CASE("curves are step functions of the checkpoints") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.algorithms.resize(1);
  spec.algorithms[0].gammas = {0.01};
  spec.algorithms[0].ls = {4};
  spec.repeats = 1;
  const fs::path dir = scratch("curve");
  const ExperimentResult r = run_experiment(spec, dir, 1);
  const RunTrace& t = r.cells[0].traces[0];
  const oracle::Csv curve = oracle::read_csv((dir / "curves" / "vr.csv").string());
  CHECK(curve.rows.size() == spec.curve_points + 1);
  for (const auto& row : curve.rows) {
    const std::uint64_t e = std::stoull(row[0]);
    double expected = t.checkpoints.front().f_value;
    for (const Checkpoint& c : t.checkpoints)
      if (c.evals <= e) expected = c.f_value;
    CHECK(std::stod(row[1]) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("logistic spec loads a LIBSVM file") {
  const fs::path dir = scratch("logistic");
  {
    std::ofstream out(dir / "toy.libsvm");
    out << "+1 1:0.5 2:1.0\n-1 1:-0.3 2:0.2\n+1 1:1.5 2:-0.4\n-1 1:0.1 2:0.9\n";
  }
  ExperimentSpec spec;
  spec.problem.kind = ProblemSpec::Kind::Logistic;
  spec.problem.dataset = (dir / "toy.libsvm").string();
  spec.problem.link = LogisticLink::Sigmoid;
  spec.problem.lambda = 0.01;
  const Problem p = build_problem(spec.problem);
  CHECK(p.n() == 4);
  CHECK(p.d() == 2);
  CHECK(evaluate_full(p, Vector{0.0, 0.0}) == doctest::Approx(std::log(2.0)));
}
