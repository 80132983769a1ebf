#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrszd/directions.hpp"
#include "vrszd/linalg.hpp"
#include "vrszd/problems.hpp"
#include "vrszd/rng.hpp"

namespace vrszd {

/// Discretization parameters beta_tau indexed by outer iteration.
class BetaSchedule {
 public:
  enum class Kind { Constant, PowerDecay, GeometricPL };

  static BetaSchedule constant(double beta);
  // (beta / d) (tau + 1)^(-alpha)
  static BetaSchedule power_decay(double beta, double alpha, std::size_t d);
  // alpha_base^(m (tau + 1) / 2) * eta0 (tau + 1)^(-eta_power); eta must be
  // square summable, so eta_power > 1/2.
  static BetaSchedule geometric_pl(double alpha_base, std::size_t m, double eta0, double eta_power);

  // Values are clamped from below at kMinBeta.
  double at(std::size_t tau) const;
  Kind kind() const { return kind_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  double scale_ = 0.0;
  double exponent_ = 0.0;
  double base_ = 1.0;
  double base_power_ = 0.0;
};

struct OptimizerConfig {
  double gamma = 0.0;
  BetaSchedule beta = BetaSchedule::constant(1e-5);
  std::size_t m = 1;  // inner iterations per outer iteration
  std::size_t b = 1;  // batch size
  std::size_t l = 1;  // directions per stochastic surrogate
  // Outer iterations to run (plain iterations for RSPGF). At least one of
  // outer_iterations / budget must be set.
  std::optional<std::size_t> outer_iterations;
  std::optional<std::uint64_t> budget;
  Seed seed;
  // Record every inner iterate x_k^tau, not only the outer iterates.
  bool record_inner = false;
  // RSPGF checkpoint spacing in evaluations; 0 picks budget / 1000.
  std::uint64_t checkpoint_interval = 0;

  void validate(const Problem& p) const;
};

struct Checkpoint {
  std::uint64_t evals;
  double f_value;
  std::optional<double> grad_map_norm_sq;
  std::size_t tau;
  std::size_t k;
};

enum class StopReason { Completed, BudgetExhausted, Diverged };

struct RunTrace {
  std::vector<Checkpoint> checkpoints;
  Vector final_point;
  std::uint64_t evals = 0;
  StopReason stop = StopReason::Completed;
};

RunTrace vr_szd(const Problem& p, const OptimizerConfig& cfg, std::span<const double> x0,
                const FrameSampler& sampler = HaarSampler{});

// Stochastic proximal step with Gaussian directions and stepsize gamma / sqrt(t + 1).
RunTrace rspgf(const Problem& p, const OptimizerConfig& cfg, std::span<const double> x0);

enum class SgeVariant { RandSGE, CoordSGE };

// Central-difference full gradient plus SVRG inner loop with central
// differences along one sphere direction (RandSGE) or all coordinates (CoordSGE).
RunTrace zo_psvrg_plus(const Problem& p, const OptimizerConfig& cfg, SgeVariant variant,
                       std::span<const double> x0);

// Evaluations charged by one full outer iteration.
std::uint64_t vr_szd_outer_cost(std::size_t n, std::size_t d, std::size_t m, std::size_t b, std::size_t l);
std::uint64_t zo_psvrg_outer_cost(std::size_t n, std::size_t d, std::size_t m, std::size_t b,
                                  SgeVariant variant);

// min(1/(4L), sqrt(l b) / (10 L m sqrt(d))).
double default_stepsize(double lipschitz, std::size_t m, std::size_t d, std::size_t l, std::size_t b);

// min(1/(4L), sqrt(l b) / (sqrt(32 (e - 1) d) L m)); admissible stepsizes are strictly below it.
double stepsize_upper_bound(double lipschitz, std::size_t m, std::size_t d, std::size_t l, std::size_t b);

// Stepsize conditions of the linear-rate result under the gradient-mapping PL
// inequality with constant mu.
bool rpl_stepsize_admissible(double gamma, double lipschitz, double mu, std::size_t m, std::size_t b,
                             std::size_t l, std::size_t d);

}  // namespace vrszd
