#include "vrszd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vrszd/dataio.hpp"
#include "vrszd/diagnostics.hpp"
#include "vrszd/error.hpp"

namespace vrszd {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::VrSzd: return "vr_szd";
    case Method::Rspgf: return "rspgf";
    case Method::ZoPsvrgRand: return "zo_psvrg_rand";
    case Method::ZoPsvrgCoord: return "zo_psvrg_coord";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "vr_szd") return Method::VrSzd;
  if (name == "rspgf") return Method::Rspgf;
  if (name == "zo_psvrg_rand") return Method::ZoPsvrgRand;
  if (name == "zo_psvrg_coord") return Method::ZoPsvrgCoord;
  throw InvalidArgument("unknown method '" + name + "'");
}

BetaSchedule BetaSpec::build(std::size_t d, std::size_t m) const {
  switch (kind) {
    case BetaSchedule::Kind::Constant: return BetaSchedule::constant(value);
    case BetaSchedule::Kind::PowerDecay: return BetaSchedule::power_decay(value, alpha, d);
    case BetaSchedule::Kind::GeometricPL: return BetaSchedule::geometric_pl(alpha, m, eta0, eta_power);
  }
  throw InvalidArgument("unknown beta schedule");
}

namespace {

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  std::vector<T> out;
  if (v.is_array()) {
    for (const json& e : v) out.push_back(e.get<T>());
  } else {
    out.push_back(v.get<T>());
  }
  if (out.empty()) throw InvalidArgument(std::string("empty grid for '") + key + "'");
  return out;
}

BetaSpec parse_beta(const json& j) {
  BetaSpec b;
  if (j.is_number()) {
    b.value = j.get<double>();
    return b;
  }
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant") {
    b.kind = BetaSchedule::Kind::Constant;
  } else if (kind == "power_decay") {
    b.kind = BetaSchedule::Kind::PowerDecay;
  } else if (kind == "geometric_pl") {
    b.kind = BetaSchedule::Kind::GeometricPL;
  } else {
    throw InvalidArgument("unknown beta kind '" + kind + "'");
  }
  b.value = j.value("value", b.value);
  b.alpha = j.value("alpha", b.alpha);
  b.eta0 = j.value("eta0", b.eta0);
  b.eta_power = j.value("eta_power", b.eta_power);
  return b;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("spec is not valid JSON: ") + e.what());
  }
  try {
    ExperimentSpec spec;
    spec.name = root.value("name", spec.name);
    spec.budget = root.value("budget", spec.budget);
    spec.repeats = root.value("repeats", spec.repeats);
    spec.seed_base = Seed{root.value("seed_base", std::uint64_t{0})};
    spec.x0 = root.value("x0", spec.x0);
    spec.curve_points = root.value("curve_points", spec.curve_points);
    if (root.contains("outer_iterations")) spec.outer_iterations = root.at("outer_iterations").get<std::size_t>();

    const json& pj = root.at("problem");
    const std::string type = pj.value("type", "lasso");
    ProblemSpec& ps = spec.problem;
    if (type == "lasso") {
      ps.kind = ProblemSpec::Kind::Lasso;
      ps.d = pj.value("d", ps.d);
      ps.cond_min = pj.value("cond_min", ps.cond_min);
      ps.cond_max = pj.value("cond_max", ps.cond_max);
      ps.seed = pj.value("seed", ps.seed);
    } else if (type == "logistic") {
      ps.kind = ProblemSpec::Kind::Logistic;
      ps.dataset = pj.at("dataset").get<std::string>();
      const std::string link = pj.value("link", "literal");
      if (link == "literal") {
        ps.link = LogisticLink::Literal;
      } else if (link == "sigmoid") {
        ps.link = LogisticLink::Sigmoid;
      } else {
        throw InvalidArgument("unknown logistic link '" + link + "'");
      }
      ps.standardize = pj.value("standardize", ps.standardize);
    } else {
      throw InvalidArgument("unknown problem type '" + type + "'");
    }
    ps.lambda = pj.value("lambda", ps.lambda);

    for (const json& aj : root.at("algorithms")) {
      AlgorithmEntry a;
      a.method = parse_method(aj.at("method").get<std::string>());
      a.label = aj.value("label", method_name(a.method));
      a.gammas = scalar_or_list<double>(aj, "gamma", {});
      if (a.gammas.empty()) throw InvalidArgument("algorithm '" + a.label + "' needs gamma");
      a.ls = scalar_or_list<std::size_t>(aj, "l", a.ls);
      a.bs = scalar_or_list<std::size_t>(aj, "b", a.bs);
      a.ms = scalar_or_list<std::size_t>(aj, "m", a.ms);
      if (aj.contains("beta")) a.beta = parse_beta(aj.at("beta"));
      spec.algorithms.push_back(std::move(a));
    }
    if (spec.algorithms.empty()) throw InvalidArgument("spec lists no algorithms");
    if (spec.repeats == 0) throw InvalidArgument("repeats must be >= 1");
    std::map<std::string, int> labels;
    for (const auto& a : spec.algorithms) {
      if (++labels[a.label] > 1) throw InvalidArgument("duplicate algorithm label '" + a.label + "'");
    }
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed spec: ") + e.what());
  }
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open spec file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentSpec spec = parse_experiment_spec(ss.str());
  // Relative dataset paths are relative to the spec file.
  if (!spec.problem.dataset.empty() && std::filesystem::path(spec.problem.dataset).is_relative()) {
    spec.problem.dataset = (path.parent_path() / spec.problem.dataset).string();
  }
  return spec;
}

Problem build_problem(const ProblemSpec& spec) {
  if (spec.kind == ProblemSpec::Kind::Lasso) {
    RandomStream rng(Seed{spec.seed});
    return make_lasso(spec.d, spec.lambda, spec.cond_min, spec.cond_max, rng);
  }
  Dataset ds = load_libsvm(spec.dataset);
  if (spec.standardize) ds = standardize(ds);
  return make_logistic_l1(ds.x, ds.labels, spec.lambda, spec.link);
}

Vector initial_point(const ExperimentSpec& spec, std::size_t d) {
  if (spec.x0 == "ones") return Vector(d, 1.0);
  if (spec.x0 == "zeros") return Vector(d, 0.0);
  throw InvalidArgument("unknown x0 '" + spec.x0 + "'");
}

std::vector<Cell> enumerate_cells(const ExperimentSpec& spec, std::size_t d) {
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < spec.algorithms.size(); ++e) {
    const AlgorithmEntry& a = spec.algorithms[e];
    std::vector<std::size_t> ms = a.ms, ls = a.ls, bs = a.bs;
    if (a.method == Method::Rspgf) ms = bs = {1};
    if (a.method == Method::ZoPsvrgRand) ls = {1};
    if (a.method == Method::ZoPsvrgCoord) ls = {d};
    for (std::size_t m : ms)
      for (std::size_t l : ls)
        for (std::size_t b : bs)
          for (double gamma : a.gammas) {
            if (l == 0 || l > d) throw InvalidArgument("grid for '" + a.label + "' has l outside [1, d]");
            if (m == 0 || b == 0 || !(gamma > 0.0)) throw InvalidArgument("grid for '" + a.label + "' is invalid");
            cells.push_back(Cell{cells.size(), e, a.label, a.method, gamma, l, b, m, a.beta});
          }
  }
  if (cells.empty()) throw InvalidArgument("empty grid");
  return cells;
}

OptimizerConfig make_config(const ExperimentSpec& spec, const Cell& cell, std::size_t d, Seed seed) {
  OptimizerConfig cfg;
  cfg.gamma = cell.gamma;
  cfg.beta = cell.beta.build(d, cell.m);
  cfg.m = cell.m;
  cfg.b = cell.b;
  cfg.l = cell.l;
  cfg.budget = spec.budget;
  cfg.outer_iterations = spec.outer_iterations;
  cfg.seed = seed;
  return cfg;
}

RunTrace run_cell(const Problem& p, const Cell& cell, const OptimizerConfig& cfg, std::span<const double> x0) {
  switch (cell.method) {
    case Method::VrSzd: return vr_szd(p, cfg, x0);
    case Method::Rspgf: return rspgf(p, cfg, x0);
    case Method::ZoPsvrgRand: return zo_psvrg_plus(p, cfg, SgeVariant::RandSGE, x0);
    case Method::ZoPsvrgCoord: return zo_psvrg_plus(p, cfg, SgeVariant::CoordSGE, x0);
  }
  throw InvalidArgument("unknown method");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_row(const ResultRow& r) {
  std::string s;
  s += r.algorithm + ',' + std::to_string(r.m) + ',' + std::to_string(r.l) + ',' + std::to_string(r.b) + ',';
  s += format_double(r.gamma) + ',' + format_double(r.beta) + ',' + std::to_string(r.seed) + ',';
  s += std::to_string(r.evals) + ',' + format_double(r.f_minus_min) + ',';
  if (r.grad_map_norm_sq) s += format_double(*r.grad_map_norm_sq);
  s += ',' + std::to_string(r.tau) + ',' + std::to_string(r.k);
  return s;
}

double clipped_score(double final_gap, double initial_gap) {
  if (!std::isfinite(final_gap) || final_gap > initial_gap) return initial_gap;
  return final_gap;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// First strictly smaller mean score wins, so ties go to the earlier cell.
void consider(std::vector<BestChoice>& best, const std::string& label, std::size_t m, const CellResult& c) {
  for (BestChoice& b : best) {
    if (b.label == label && b.m == m) {
      if (c.mean_score < b.mean_score) {
        b.cell = c.cell.index;
        b.mean_score = c.mean_score;
      }
      return;
    }
  }
  best.push_back(BestChoice{label, m, c.cell.index, c.mean_score});
}

}  // namespace

ExperimentResult grid_search(const ExperimentSpec& spec, std::size_t workers) {
  const Problem problem = build_problem(spec.problem);
  const Vector x0 = initial_point(spec, problem.d());
  const std::vector<Cell> cells = enumerate_cells(spec, problem.d());

  ExperimentResult result;
  result.min_value = problem.known_min().value_or(0.0);
  result.initial_gap = evaluate_full(problem, x0) - result.min_value;

  const std::size_t jobs = cells.size() * spec.repeats;
  std::vector<RunTrace> traces(jobs);
  std::vector<std::uint64_t> seeds(jobs);
  for (std::size_t j = 0; j < jobs; ++j) {
    seeds[j] = derive_seed(spec.seed_base, j % spec.repeats, cells[j / spec.repeats].index).value;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        const Cell& cell = cells[j / spec.repeats];
        const OptimizerConfig cfg = make_config(spec, cell, problem.d(), Seed{seeds[j]});
        traces[j] = run_cell(problem, cell, cfg, x0);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, jobs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const Cell& cell : cells) {
    CellResult cr;
    cr.cell = cell;
    for (std::size_t r = 0; r < spec.repeats; ++r) {
      const std::size_t j = cell.index * spec.repeats + r;
      const double gap = traces[j].checkpoints.back().f_value - result.min_value;
      cr.seeds.push_back(seeds[j]);
      cr.final_gaps.push_back(gap);
      cr.scores.push_back(clipped_score(gap, result.initial_gap));
      if (cr.scores.back() != gap) ++cr.diverged;
      cr.traces.push_back(std::move(traces[j]));
    }
    cr.mean_score = mean_of(cr.scores);
    cr.std_score = population_std(cr.scores, cr.mean_score);
    consider(result.best_per_m, cell.label, cell.m, cr);
    consider(result.best_per_label, cell.label, 0, cr);
    result.cells.push_back(std::move(cr));
  }
  return result;
}

void write_runs_csv(const ExperimentResult& result, const ExperimentSpec& spec, std::ostream& out) {
  (void)spec;
  out << kResultHeader << '\n';
  for (const CellResult& c : result.cells) {
    const BetaSpec& beta = c.cell.beta;
    for (std::size_t r = 0; r < c.traces.size(); ++r) {
      const BetaSchedule schedule = beta.build(c.traces[r].final_point.size(), c.cell.m);
      for (const Checkpoint& cp : c.traces[r].checkpoints) {
        const ResultRow row{c.cell.label, c.cell.m, c.cell.l, c.cell.b, c.cell.gamma, schedule.at(cp.tau),
                            c.seeds[r], cp.evals, cp.f_value - result.min_value, cp.grad_map_norm_sq,
                            cp.tau, cp.k};
        out << format_row(row) << '\n';
      }
    }
  }
}

void write_summary_csv(const ExperimentResult& result, std::ostream& out) {
  out << "algorithm,method,m,l,b,gamma,repeats,mean_final,std_final,diverged\n";
  for (const CellResult& c : result.cells) {
    out << c.cell.label << ',' << method_name(c.cell.method) << ',' << c.cell.m << ',' << c.cell.l << ','
        << c.cell.b << ',' << format_double(c.cell.gamma) << ',' << c.scores.size() << ','
        << format_double(c.mean_score) << ',' << format_double(c.std_score) << ',' << c.diverged << '\n';
  }
}

void write_best_csv(const ExperimentResult& result, std::ostream& out) {
  out << "algorithm,scope_m,m,l,b,gamma,mean_final\n";
  auto emit = [&](const BestChoice& b) {
    const Cell& c = result.cells[b.cell].cell;
    out << b.label << ',' << (b.m == 0 ? std::string("all") : std::to_string(b.m)) << ',' << c.m << ',' << c.l
        << ',' << c.b << ',' << format_double(c.gamma) << ',' << format_double(b.mean_score) << '\n';
  };
  for (const BestChoice& b : result.best_per_m) emit(b);
  for (const BestChoice& b : result.best_per_label) emit(b);
}

namespace {

void write_curve(const CellResult& c, const ExperimentSpec& spec, double min_value, std::ostream& out) {
  const std::size_t points = std::max<std::size_t>(spec.curve_points, 1);
  std::vector<std::uint64_t> grid;
  for (std::size_t q = 0; q <= points; ++q) grid.push_back(spec.budget * q / points);
  std::vector<std::vector<double>> curves;
  for (const RunTrace& t : c.traces) curves.push_back(step_curve(t, grid, min_value));
  out << "evals,mean,std\n";
  for (std::size_t q = 0; q < grid.size(); ++q) {
    std::vector<double> column;
    for (const auto& curve : curves) column.push_back(curve[q]);
    const double mean = mean_of(column);
    out << grid[q] << ',' << format_double(mean) << ',' << format_double(population_std(column, mean)) << '\n';
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                std::size_t workers) {
  ExperimentResult result = grid_search(spec, workers);
  std::filesystem::create_directories(out_dir / "curves");
  {
    auto out = open_for_write(out_dir / "runs.csv");
    write_runs_csv(result, spec, out);
  }
  {
    auto out = open_for_write(out_dir / "summary.csv");
    write_summary_csv(result, out);
  }
  {
    auto out = open_for_write(out_dir / "best.csv");
    write_best_csv(result, out);
  }
  for (const BestChoice& b : result.best_per_label) {
    auto out = open_for_write(out_dir / "curves" / (b.label + ".csv"));
    write_curve(result.cells[b.cell], spec, result.min_value, out);
  }
  return result;
}

}  // namespace vrszd
