#include <doctest.h>

#include <cmath>

#include "vrszd/error.hpp"
#include "vrszd/estimators.hpp"
#include "vrszd/optimizers.hpp"

using namespace vrszd;

namespace {

Problem small_lasso(std::uint64_t seed = 1, std::size_t d = 10, double lambda = 1e-3) {
  RandomStream rng(Seed{seed});
  return make_lasso(d, lambda, 1.0, 3.0, rng);
}

OptimizerConfig base_config() {
  OptimizerConfig cfg;
  cfg.gamma = 0.01;
  cfg.m = 5;
  cfg.b = 1;
  cfg.l = 2;
  cfg.outer_iterations = 3;
  cfg.seed = Seed{7};
  return cfg;
}

}  // namespace

TEST_CASE("outer iteration costs") {
  CHECK(vr_szd_outer_cost(50, 50, 50, 1, 25) == 5150);
  CHECK(zo_psvrg_outer_cost(50, 50, 50, 1, SgeVariant::RandSGE) == 2 * 50 * 50 + 4 * 50);
  CHECK(zo_psvrg_outer_cost(50, 50, 50, 2, SgeVariant::CoordSGE) == 2 * 50 * 50 + 4 * 50 * 2 * 50);
}

TEST_CASE("runs charge exactly the tabulated cost") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.b = 2;
  const RunTrace vr = vr_szd(p, cfg, x0);
  CHECK(vr.evals == 3 * vr_szd_outer_cost(p.n(), p.d(), cfg.m, cfg.b, cfg.l));
  CHECK(vr.stop == StopReason::Completed);
  CHECK(vr.checkpoints.size() == 4);

  const RunTrace rand = zo_psvrg_plus(p, cfg, SgeVariant::RandSGE, x0);
  CHECK(rand.evals == 3 * zo_psvrg_outer_cost(p.n(), p.d(), cfg.m, cfg.b, SgeVariant::RandSGE));
  const RunTrace coord = zo_psvrg_plus(p, cfg, SgeVariant::CoordSGE, x0);
  CHECK(coord.evals == 3 * zo_psvrg_outer_cost(p.n(), p.d(), cfg.m, cfg.b, SgeVariant::CoordSGE));

  OptimizerConfig rs = base_config();
  rs.outer_iterations = 17;
  rs.l = 4;
  const RunTrace r = rspgf(p, rs, x0);
  CHECK(r.evals == 17 * 5);
}

TEST_CASE("budget stops before an unaffordable step") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.outer_iterations.reset();
  const std::uint64_t outer = vr_szd_outer_cost(p.n(), p.d(), cfg.m, cfg.b, cfg.l);
  cfg.budget = 2 * outer + 7;
  const RunTrace t = vr_szd(p, cfg, x0);
  CHECK(t.stop == StopReason::BudgetExhausted);
  CHECK(t.evals <= *cfg.budget);
  CHECK(t.evals == 2 * outer);

  cfg.budget = 10;  // not even one full surrogate (n (d + 1) = 110)
  const RunTrace none = vr_szd(p, cfg, x0);
  CHECK(none.evals == 0);
  CHECK(none.final_point == x0);
  CHECK(none.checkpoints.size() == 1);

  OptimizerConfig rs = base_config();
  rs.outer_iterations.reset();
  rs.l = 3;
  rs.budget = 1001;
  const RunTrace r = rspgf(p, rs, x0);
  CHECK(r.evals == 1000);
  CHECK(r.stop == StopReason::BudgetExhausted);
}

TEST_CASE("budget exhausted mid-epoch records the current inner iterate") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.outer_iterations.reset();
  const std::uint64_t full = p.n() * (p.d() + 1);
  cfg.budget = full + 2 * 3 * 2;  // full surrogate plus two inner steps
  const RunTrace t = vr_szd(p, cfg, x0);
  CHECK(t.evals == *cfg.budget);
  CHECK(t.checkpoints.back().evals == t.evals);
  CHECK(t.checkpoints.back().k == 2);
}

TEST_CASE("same seed reproduces the run exactly") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  const OptimizerConfig cfg = base_config();
  const RunTrace a = vr_szd(p, cfg, x0);
  const RunTrace b = vr_szd(p, cfg, x0);
  CHECK(a.final_point == b.final_point);
  REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) CHECK(a.checkpoints[i].f_value == b.checkpoints[i].f_value);
  OptimizerConfig other = cfg;
  other.seed = Seed{8};
  CHECK(vr_szd(p, other, x0).final_point != a.final_point);
}

TEST_CASE("VR-SZD decreases the lasso objective") {
  const Problem p = small_lasso(2, 20, 1e-5);
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.m = 20;
  cfg.l = 10;
  cfg.outer_iterations = 30;
  cfg.gamma = 0.01;
  const RunTrace t = vr_szd(p, cfg, x0);
  CHECK(t.checkpoints.back().f_value < 0.1 * t.checkpoints.front().f_value);
}

TEST_CASE("one inner step from the snapshot is a proximal full-surrogate step") {
  // At k = 0 the variance-reduction correction cancels, leaving prox(x0 - gamma g(x0)).
  const Problem p = small_lasso(3, 6, 0.05);
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.l = p.d();
  cfg.m = 1;
  cfg.outer_iterations = 1;
  const RunTrace t = vr_szd(p, cfg, x0, CanonicalSampler{});
  EvalLedger ledger;
  const FullSurrogate g = full_fd_gradient(p, x0, cfg.beta.at(0), ledger);
  Vector expected = x0;
  axpy(-cfg.gamma, g.g, expected);
  p.h().apply_inplace(expected, cfg.gamma);
  for (std::size_t j = 0; j < p.d(); ++j) CHECK(t.final_point[j] == doctest::Approx(expected[j]).epsilon(1e-12));
}

TEST_CASE("divergence is reported and stops the run") {
  // Overflow shows up as NaN once the iterate leaves a moderate region.
  const Problem p("blowup", 2, 3,
                  [](std::size_t, std::span<const double> x) {
                    const double v = 0.5 * squared_norm(x);
                    return v > 1e6 ? std::nan("") : v;
                  },
                  ProxTerm::zero());
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.gamma = 10.0;
  cfg.outer_iterations = 200;
  const RunTrace t = vr_szd(p, cfg, x0);
  CHECK(t.stop == StopReason::Diverged);
  CHECK_FALSE(all_finite(t.final_point));
  CHECK(t.evals < 200 * vr_szd_outer_cost(p.n(), p.d(), cfg.m, cfg.b, cfg.l));
}

TEST_CASE("record_inner adds every inner iterate") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.record_inner = true;
  const RunTrace t = vr_szd(p, cfg, x0);
  CHECK(t.checkpoints.size() == 3 * cfg.m + 1);
  for (const Checkpoint& c : t.checkpoints) CHECK(c.grad_map_norm_sq.has_value());
}

TEST_CASE("configuration validation") {
  const Problem p = small_lasso();
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(vr_szd(p, cfg, x0), InvalidArgument);
  cfg = base_config();
  cfg.l = p.d() + 1;
  CHECK_THROWS_AS(vr_szd(p, cfg, x0), InvalidArgument);
  cfg = base_config();
  cfg.outer_iterations.reset();
  CHECK_THROWS_AS(vr_szd(p, cfg, x0), InvalidArgument);
  cfg = base_config();
  CHECK_THROWS_AS(vr_szd(p, cfg, Vector(3, 0.0)), InvalidArgument);
}

TEST_CASE("beta schedules") {
  const BetaSchedule c = BetaSchedule::constant(1e-5);
  CHECK(c.at(0) == 1e-5);
  CHECK(c.at(1000) == 1e-5);
  const BetaSchedule pd = BetaSchedule::power_decay(1.0, 0.75, 10);
  CHECK(pd.at(0) == doctest::Approx(0.1));
  CHECK(pd.at(15) == doctest::Approx(0.1 * std::pow(16.0, -0.75)));
  const BetaSchedule g = BetaSchedule::geometric_pl(0.9, 4, 1e-3, 0.75);
  CHECK(g.at(0) == doctest::Approx(std::pow(0.9, 2.0) * 1e-3));
  CHECK(g.at(2) == doctest::Approx(std::pow(0.9, 6.0) * 1e-3 * std::pow(3.0, -0.75)));
  CHECK(g.at(100000) == kMinBeta);
  CHECK_THROWS_AS(BetaSchedule::geometric_pl(0.9, 4, 1e-3, 0.5), InvalidArgument);
  CHECK_THROWS_AS(BetaSchedule::geometric_pl(1.0, 4, 1e-3, 0.75), InvalidArgument);
  CHECK_THROWS_AS(BetaSchedule::constant(0.0), InvalidArgument);
}

TEST_CASE("stepsize helpers") {
  CHECK(default_stepsize(1.0, 1, 1, 1, 1) == doctest::Approx(0.1));
  CHECK(default_stepsize(1.0, 1, 1, 100, 1) == doctest::Approx(0.25));
  const double bound = stepsize_upper_bound(2.0, 10, 50, 5, 1);
  CHECK(bound == doctest::Approx(std::sqrt(5.0) / (std::sqrt(32.0 * (std::exp(1.0) - 1.0) * 50.0) * 20.0)));
  CHECK(rpl_stepsize_admissible(4.9e-3, 10.0, 1.0, 2, 1, 50, 50));
  CHECK_FALSE(rpl_stepsize_admissible(0.1, 10.0, 1.0, 2, 1, 50, 50));
  CHECK_FALSE(rpl_stepsize_admissible(0.9, 1.0, 1.0, 1, 1, 1, 1));
}

TEST_CASE("VR-SZD on half the squared norm contracts by 1 - gamma") {
  const Problem p("half_sq", 1, 3, [](std::size_t, std::span<const double> x) { return 0.5 * squared_norm(x); },
                  ProxTerm::zero());
  OptimizerConfig cfg;
  cfg.gamma = 0.2;
  cfg.beta = BetaSchedule::constant(1e-8);
  cfg.m = 1;
  cfg.b = 1;
  cfg.l = 3;
  cfg.outer_iterations = 10;
  cfg.seed = Seed{1};
  const Vector x0{1.0, -2.0, 0.5};
  const RunTrace t = vr_szd(p, cfg, x0, CanonicalSampler{});
  const double factor = std::pow(0.8, 10);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(t.final_point[j] - factor * x0[j]) < 1e-6);
}

TEST_CASE("CoordSGE first inner step is a central-difference gradient step") {
  const Problem p = small_lasso(4, 5);
  const Vector x0(p.d(), 1.0);
  OptimizerConfig cfg = base_config();
  cfg.m = 1;
  cfg.b = p.n();
  cfg.outer_iterations = 1;
  OptimizerConfig smooth = cfg;
  RandomStream rng(Seed{4});
  const Problem q = lasso_problem(make_lasso_matrix(5, 1.0, 3.0, rng), Vector(5, 0.0), 0.0);
  const RunTrace t = zo_psvrg_plus(q, smooth, SgeVariant::CoordSGE, x0);
  EvalLedger ledger;
  const Vector g = central_fd_gradient(q, x0, smooth.beta.at(0), ledger);
  Vector expected = x0;
  axpy(-cfg.gamma, g, expected);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(t.final_point[j] - expected[j]) < 1e-10);
}

TEST_CASE("RSPGF stays bounded on a two-dimensional quadratic") {
  RandomStream rng(Seed{5});
  const Problem p = make_quadratic_sum(4, 2, rng);
  OptimizerConfig cfg;
  cfg.gamma = 0.1;
  cfg.l = 1;
  cfg.outer_iterations = 10000;
  cfg.seed = Seed{6};
  cfg.checkpoint_interval = 100;
  const Vector x0{1.0, 1.0};
  const RunTrace t = rspgf(p, cfg, x0);
  const double start = t.checkpoints.front().f_value;
  for (const Checkpoint& c : t.checkpoints) CHECK(c.f_value <= start + 1.0);
  CHECK(t.stop == StopReason::Completed);
}

TEST_CASE("l = 1 VR-SZD and RandSGE inner directions agree on linear components") {
  // On f_i(x) = a^T x both estimators are unbiased for a; forward and central
  // differences coincide, so their Monte-Carlo means must agree.
  const std::size_t d = 4;
  const Vector a{1.0, -2.0, 0.5, 3.0};
  const Problem p("linear", 1, d, [a](std::size_t, std::span<const double> x) { return dot(a, x); },
                  ProxTerm::zero());
  RandomStream rng(Seed{9});
  const Vector x{0.5, 0.5, -1.0, 2.0};
  const int draws = 10000;
  Vector sum_vr(d, 0.0), sum_rand(d, 0.0), sq_vr(d, 0.0), sq_rand(d, 0.0);
  EvalLedger ledger;
  for (int k = 0; k < draws; ++k) {
    Vector gv(d, 0.0), gr(d, 0.0);
    accumulate_structured(p, 0, x, sample_haar_frame(d, 1, rng), 1e-3, 1.0, gv, ledger);
    accumulate_central_sphere(p, 0, x, sample_sphere_direction(d, rng).column(0), 1e-3, 1.0, gr, ledger);
    for (std::size_t j = 0; j < d; ++j) {
      sum_vr[j] += gv[j];
      sq_vr[j] += gv[j] * gv[j];
      sum_rand[j] += gr[j];
      sq_rand[j] += gr[j] * gr[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double mv = sum_vr[j] / draws, mr = sum_rand[j] / draws;
    const double se = std::sqrt((sq_vr[j] / draws - mv * mv + sq_rand[j] / draws - mr * mr) / draws);
    CHECK(std::abs(mv - mr) < 3 * se);
  }
}

TEST_CASE("default stepsize examples") {
  CHECK(default_stepsize(10.0, 50, 50, 25, 1) == doctest::Approx(5.0 / (10.0 * 10.0 * 50.0 * std::sqrt(50.0))));
  CHECK(default_stepsize(10.0, 1, 1, 1, 1) == doctest::Approx(0.01));
  CHECK_THROWS_AS(default_stepsize(10.0, 1, 1, 0, 1), InvalidArgument);
}
