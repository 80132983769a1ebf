#include "vrszd/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vrszd/diagnostics.hpp"
#include "vrszd/error.hpp"
#include "vrszd/estimators.hpp"

namespace vrszd {

BetaSchedule BetaSchedule::constant(double beta) {
  check_beta(beta);
  BetaSchedule s;
  s.kind_ = Kind::Constant;
  s.scale_ = beta;
  return s;
}

BetaSchedule BetaSchedule::power_decay(double beta, double alpha, std::size_t d) {
  if (!(beta > 0.0) || d == 0) throw InvalidArgument("power_decay needs beta > 0 and d >= 1");
  if (!(alpha > 0.0)) throw InvalidArgument("power_decay needs alpha > 0");
  BetaSchedule s;
  s.kind_ = Kind::PowerDecay;
  s.scale_ = beta / static_cast<double>(d);
  s.exponent_ = alpha;
  return s;
}

BetaSchedule BetaSchedule::geometric_pl(double alpha_base, std::size_t m, double eta0, double eta_power) {
  if (!(alpha_base > 0.0 && alpha_base < 1.0)) throw InvalidArgument("geometric_pl needs 0 < alpha < 1");
  if (m == 0 || !(eta0 > 0.0)) throw InvalidArgument("geometric_pl needs m >= 1 and eta0 > 0");
  if (!(eta_power > 0.5)) throw InvalidArgument("geometric_pl needs a square-summable eta (power > 1/2)");
  BetaSchedule s;
  s.kind_ = Kind::GeometricPL;
  s.scale_ = eta0;
  s.exponent_ = eta_power;
  s.base_ = alpha_base;
  s.base_power_ = static_cast<double>(m) / 2.0;
  return s;
}

double BetaSchedule::at(std::size_t tau) const {
  const double t1 = static_cast<double>(tau) + 1.0;
  double beta = scale_;
  switch (kind_) {
    case Kind::Constant:
      break;
    case Kind::PowerDecay:
      beta = scale_ * std::pow(t1, -exponent_);
      break;
    case Kind::GeometricPL:
      beta = std::pow(base_, base_power_ * t1) * scale_ * std::pow(t1, -exponent_);
      break;
  }
  return std::max(beta, kMinBeta);
}

std::string BetaSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "constant(" << scale_ << ")";
      break;
    case Kind::PowerDecay:
      os << "power_decay(" << scale_ << "," << exponent_ << ")";
      break;
    case Kind::GeometricPL:
      os << "geometric_pl(" << base_ << "," << 2.0 * base_power_ << "," << scale_ << "," << exponent_ << ")";
      break;
  }
  return os.str();
}

void OptimizerConfig::validate(const Problem& p) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("stepsize gamma must be > 0");
  if (m == 0) throw InvalidArgument("inner iterations m must be >= 1");
  if (b == 0) throw InvalidArgument("batch size b must be >= 1");
  if (l == 0 || l > p.d()) throw InvalidArgument("direction count must satisfy 1 <= l <= d");
  if (!outer_iterations && !budget) throw InvalidArgument("set outer_iterations or budget");
  if (budget && *budget == 0) throw InvalidArgument("budget must be positive");
}

std::uint64_t vr_szd_outer_cost(std::size_t n, std::size_t d, std::size_t m, std::size_t b, std::size_t l) {
  return static_cast<std::uint64_t>(n) * (d + 1) + 2ULL * m * b * (l + 1);
}

std::uint64_t zo_psvrg_outer_cost(std::size_t n, std::size_t d, std::size_t m, std::size_t b,
                                  SgeVariant variant) {
  const std::uint64_t inner = variant == SgeVariant::RandSGE ? 4ULL * m * b : 4ULL * m * b * d;
  return 2ULL * n * d + inner;
}

namespace {

class TraceRecorder {
 public:
  TraceRecorder(const Problem& p, double gamma) : problem_(p), gamma_(gamma) {}

  void record(std::uint64_t evals, std::span<const double> x, std::size_t tau, std::size_t k) {
    if (!trace_.checkpoints.empty() && trace_.checkpoints.back().evals >= evals) return;
    Checkpoint c{evals, evaluate_full(problem_, x), std::nullopt, tau, k};
    if (problem_.has_gradient() && all_finite(x)) c.grad_map_norm_sq = gradient_mapping(problem_, x, gamma_).norm_sq;
    trace_.checkpoints.push_back(c);
  }

  RunTrace finish(std::span<const double> x, std::uint64_t evals, StopReason stop) {
    trace_.final_point.assign(x.begin(), x.end());
    trace_.evals = evals;
    trace_.stop = stop;
    return std::move(trace_);
  }

 private:
  const Problem& problem_;
  double gamma_;
  RunTrace trace_;
};

bool more_outer(const OptimizerConfig& cfg, std::size_t tau) {
  return !cfg.outer_iterations || tau < *cfg.outer_iterations;
}

// Shared SVRG skeleton: full surrogate at the snapshot, m inner proximal steps
// with a variance-reduced direction. `full_gradient` charges its own cost;
// `inner_correction` adds (1/b) sum_j (est(x_k) - est(x_snapshot)) into v.
template <class FullGradient, class InnerCorrection>
RunTrace svrg_loop(const Problem& p, const OptimizerConfig& cfg, std::span<const double> x0,
                   std::uint64_t full_cost, std::uint64_t step_cost, FullGradient&& full_gradient,
                   InnerCorrection&& inner_correction) {
  cfg.validate(p);
  p.check_dimension(x0);
  EvalLedger ledger(cfg.budget);
  RandomStream rng(cfg.seed);
  TraceRecorder recorder(p, cfg.gamma);

  Vector x(x0.begin(), x0.end());
  recorder.record(0, x, 0, 0);
  std::size_t tau = 0;
  while (more_outer(cfg, tau)) {
    const double beta = cfg.beta.at(tau);
    if (!ledger.can_afford(full_cost)) {
      return recorder.finish(x, ledger.count(), StopReason::BudgetExhausted);
    }
    const Vector g = full_gradient(x, beta, ledger);
    const Vector snapshot = x;
    Vector v(p.d());
    for (std::size_t k = 0; k < cfg.m; ++k) {
      if (!ledger.can_afford(step_cost)) {
        recorder.record(ledger.count(), x, tau, k);
        return recorder.finish(x, ledger.count(), StopReason::BudgetExhausted);
      }
      v = g;
      inner_correction(x, snapshot, beta, v, rng, ledger);
      axpy(-cfg.gamma, v, x);
      p.h().apply_inplace(x, cfg.gamma);
      if (!all_finite(x)) {
        recorder.record(ledger.count(), x, tau, k + 1);
        return recorder.finish(x, ledger.count(), StopReason::Diverged);
      }
      if (cfg.record_inner && k + 1 < cfg.m) recorder.record(ledger.count(), x, tau, k + 1);
    }
    ++tau;
    recorder.record(ledger.count(), x, tau, 0);
  }
  return recorder.finish(x, ledger.count(), StopReason::Completed);
}

}  // namespace

RunTrace vr_szd(const Problem& p, const OptimizerConfig& cfg, std::span<const double> x0,
                const FrameSampler& sampler) {
  const std::size_t n = p.n();
  const std::size_t d = p.d();
  const double weight = 1.0 / static_cast<double>(cfg.b);
  return svrg_loop(
      p, cfg, x0, static_cast<std::uint64_t>(n) * (d + 1), 2ULL * cfg.b * (cfg.l + 1),
      [&](std::span<const double> x, double beta, EvalLedger& ledger) {
        return full_fd_gradient(p, x, beta, ledger).g;
      },
      [&](std::span<const double> x, std::span<const double> snapshot, double beta, Vector& v,
          RandomStream& rng, EvalLedger& ledger) {
        for (std::size_t j = 0; j < cfg.b; ++j) {
          const std::size_t i = rng.index(n);
          const DirectionSet frame = sampler.sample(d, cfg.l, rng);
          accumulate_structured(p, i, x, frame, beta, weight, v, ledger);
          accumulate_structured(p, i, snapshot, frame, beta, -weight, v, ledger);
        }
      });
}

RunTrace zo_psvrg_plus(const Problem& p, const OptimizerConfig& cfg, SgeVariant variant,
                       std::span<const double> x0) {
  const std::size_t n = p.n();
  const std::size_t d = p.d();
  const double weight = 1.0 / static_cast<double>(cfg.b);
  const std::uint64_t per_element = variant == SgeVariant::RandSGE ? 4 : 4ULL * d;
  return svrg_loop(
      p, cfg, x0, 2ULL * n * d, per_element * cfg.b,
      [&](std::span<const double> x, double beta, EvalLedger& ledger) {
        return central_fd_gradient(p, x, beta, ledger);
      },
      [&](std::span<const double> x, std::span<const double> snapshot, double beta, Vector& v,
          RandomStream& rng, EvalLedger& ledger) {
        for (std::size_t j = 0; j < cfg.b; ++j) {
          const std::size_t i = rng.index(n);
          if (variant == SgeVariant::RandSGE) {
            const DirectionSet u = sample_sphere_direction(d, rng);
            accumulate_central_sphere(p, i, x, u.column(0), beta, weight, v, ledger);
            accumulate_central_sphere(p, i, snapshot, u.column(0), beta, -weight, v, ledger);
          } else {
            accumulate_central_coordinates(p, i, x, beta, weight, v, ledger);
            accumulate_central_coordinates(p, i, snapshot, beta, -weight, v, ledger);
          }
        }
      });
}

RunTrace rspgf(const Problem& p, const OptimizerConfig& cfg, std::span<const double> x0) {
  cfg.validate(p);
  p.check_dimension(x0);
  EvalLedger ledger(cfg.budget);
  RandomStream rng(cfg.seed);
  TraceRecorder recorder(p, cfg.gamma);
  const std::uint64_t step_cost = cfg.l + 1;
  std::uint64_t interval = cfg.checkpoint_interval;
  if (interval == 0) interval = cfg.budget ? std::max<std::uint64_t>(*cfg.budget / 1000, 1) : 1;

  Vector x(x0.begin(), x0.end());
  recorder.record(0, x, 0, 0);
  std::uint64_t next_checkpoint = interval;
  std::size_t t = 0;
  StopReason stop = StopReason::Completed;
  while (more_outer(cfg, t)) {
    if (!ledger.can_afford(step_cost)) {
      stop = StopReason::BudgetExhausted;
      break;
    }
    const double gamma_t = cfg.gamma / std::sqrt(static_cast<double>(t) + 1.0);
    const std::size_t i = rng.index(p.n());
    const Vector g = gaussian_stoch_gradient(p, i, x, cfg.l, cfg.beta.at(t), rng, ledger);
    axpy(-gamma_t, g, x);
    p.h().apply_inplace(x, gamma_t);
    ++t;
    if (!all_finite(x)) {
      stop = StopReason::Diverged;
      break;
    }
    if (ledger.count() >= next_checkpoint) {
      recorder.record(ledger.count(), x, t, 0);
      while (next_checkpoint <= ledger.count()) next_checkpoint += interval;
    }
  }
  recorder.record(ledger.count(), x, t, 0);
  return recorder.finish(x, ledger.count(), stop);
}

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

}  // namespace

double default_stepsize(double lipschitz, std::size_t m, std::size_t d, std::size_t l, std::size_t b) {
  check_positive(lipschitz, "L");
  check_positive(static_cast<double>(m), "m");
  check_positive(static_cast<double>(d), "d");
  check_positive(static_cast<double>(l), "l");
  check_positive(static_cast<double>(b), "b");
  const double choice = std::sqrt(static_cast<double>(l * b)) /
                        (10.0 * lipschitz * static_cast<double>(m) * std::sqrt(static_cast<double>(d)));
  return std::min(1.0 / (4.0 * lipschitz), choice);
}

double stepsize_upper_bound(double lipschitz, std::size_t m, std::size_t d, std::size_t l, std::size_t b) {
  check_positive(lipschitz, "L");
  if (m == 0 || d == 0 || l == 0 || b == 0) throw InvalidArgument("m, d, l, b must be positive");
  const double bound = std::sqrt(static_cast<double>(l * b)) /
                       (std::sqrt(32.0 * (std::numbers::e - 1.0) * static_cast<double>(d)) * lipschitz *
                        static_cast<double>(m));
  return std::min(1.0 / (4.0 * lipschitz), bound);
}

bool rpl_stepsize_admissible(double gamma, double lipschitz, double mu, std::size_t m, std::size_t b,
                             std::size_t l, std::size_t d) {
  check_positive(gamma, "gamma");
  check_positive(lipschitz, "L");
  check_positive(mu, "mu");
  if (m == 0 || d == 0 || l == 0 || b == 0) throw InvalidArgument("m, d, l, b must be positive");
  const double md = static_cast<double>(m);
  const double theta = 1.0 - mu * gamma / 2.0 - mu * gamma * md;
  if (!(theta > 0.0)) return false;
  const double bound = std::min({1.0 / (4.0 * lipschitz), 2.0 / (mu * (2.0 * md + 1.0)),
                                 std::sqrt(static_cast<double>(b) * theta) / (10.0 * md * lipschitz) *
                                     std::sqrt(static_cast<double>(l) / static_cast<double>(d))});
  return gamma < bound;
}

}  // namespace vrszd
