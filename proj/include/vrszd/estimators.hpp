#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "vrszd/directions.hpp"
#include "vrszd/linalg.hpp"
#include "vrszd/problems.hpp"
#include "vrszd/rng.hpp"

namespace vrszd {

// Below this the forward difference f(x + beta u) - f(x) has no significant digits left.
inline constexpr double kMinBeta = 1e-12;

void check_beta(double beta);

/// Forward differences of the full average f along the canonical basis.
struct FullSurrogate {
  Vector g;
  double beta;
  std::uint64_t evals_charged;  // n (d + 1)
};

/// (d / l) sum_j (f_i(x + beta G e_j) - f_i(x)) / beta * G e_j.
struct StochasticSurrogate {
  Vector g;
  std::size_t index;
  double beta;
  std::uint64_t evals_charged;  // l + 1
};

FullSurrogate full_fd_gradient(const Problem& p, std::span<const double> x, double beta, EvalLedger& ledger);

StochasticSurrogate structured_stoch_gradient(const Problem& p, std::size_t i, std::span<const double> x,
                                              const DirectionSet& frame, double beta, EvalLedger& ledger);

// out += weight * structured surrogate. Charges l + 1.
void accumulate_structured(const Problem& p, std::size_t i, std::span<const double> x,
                           const DirectionSet& frame, double beta, double weight, std::span<double> out,
                           EvalLedger& ledger);

// Estimators used by the baselines.

// Central differences of f along the canonical basis. Charges 2 n d.
Vector central_fd_gradient(const Problem& p, std::span<const double> x, double beta, EvalLedger& ledger);

// out += weight * d (f_i(x + beta v) - f_i(x - beta v)) / (2 beta) * v. Charges 2.
void accumulate_central_sphere(const Problem& p, std::size_t i, std::span<const double> x,
                               std::span<const double> v, double beta, double weight, std::span<double> out,
                               EvalLedger& ledger);

// out += weight * sum_j (f_i(x + beta e_j) - f_i(x - beta e_j)) / (2 beta) e_j. Charges 2 d.
void accumulate_central_coordinates(const Problem& p, std::size_t i, std::span<const double> x, double beta,
                                    double weight, std::span<double> out, EvalLedger& ledger);

// (1 / l) sum_j (f_i(x + beta u_j) - f_i(x)) / beta * u_j with u_j ~ N(0, I). Charges l + 1.
Vector gaussian_stoch_gradient(const Problem& p, std::size_t i, std::span<const double> x, std::size_t l,
                               double beta, RandomStream& rng, EvalLedger& ledger);

// Uniform point in the unit ball of R^d.
Vector sample_unit_ball(std::size_t d, RandomStream& rng);

/// Monte-Carlo estimate of f_beta(x) = E_{u ~ U(ball)} f(x + beta u).
struct SmoothedEstimate {
  double value;
  double std_error;
};

SmoothedEstimate smoothed_value(const Problem& p, std::span<const double> x, double beta,
                                std::size_t n_samples, RandomStream& rng);

}  // namespace vrszd
