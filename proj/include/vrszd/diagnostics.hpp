#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrszd/optimizers.hpp"
#include "vrszd/problems.hpp"

namespace vrszd {

inline constexpr double kDiagnosticBeta = 1e-7;

struct GradMapReport {
  double norm_sq;
  double gamma;
  bool used_analytic_grad;
};

// ||(x - prox_{gamma h}(x - gamma grad f(x))) / gamma||^2. Uses the analytic
// gradient when available, forward differences with beta = 1e-7 otherwise.
// Never charged to a ledger.
GradMapReport gradient_mapping(const Problem& p, std::span<const double> x, double gamma);

// Mean of squared gradient-mapping norms over the inner iterates.
double eta_metric(std::span<const double> grad_map_norms_sq);

// Squared gradient-mapping norms of checkpoints with tau < outer_limit.
std::vector<double> inner_grad_map_norms(const RunTrace& trace, std::size_t outer_limit);

// Value of the per-evaluation step function at each grid point: the value of
// the last checkpoint with evals <= grid point (held after the run ends).
std::vector<double> step_curve(const RunTrace& trace, std::span<const std::uint64_t> grid,
                               double offset = 0.0);

}  // namespace vrszd
