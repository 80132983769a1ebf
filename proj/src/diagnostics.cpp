#include "vrszd/diagnostics.hpp"

#include <algorithm>
#include <numeric>

#include "vrszd/error.hpp"
#include "vrszd/estimators.hpp"

namespace vrszd {

GradMapReport gradient_mapping(const Problem& p, std::span<const double> x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("gradient mapping needs gamma > 0");
  p.check_dimension(x);
  Vector grad(p.d());
  bool analytic = p.has_gradient();
  if (analytic) {
    p.gradient(x, grad);
  } else {
    EvalLedger scratch;
    grad = full_fd_gradient(p, x, kDiagnosticBeta, scratch).g;
  }
  Vector step(x.begin(), x.end());
  axpy(-gamma, grad, step);
  p.h().apply_inplace(step, gamma);
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double gj = (x[j] - step[j]) / gamma;
    norm_sq += gj * gj;
  }
  return {norm_sq, gamma, analytic};
}

double eta_metric(std::span<const double> grad_map_norms_sq) {
  if (grad_map_norms_sq.empty()) throw InvalidArgument("eta_metric needs at least one entry");
  const double sum = std::accumulate(grad_map_norms_sq.begin(), grad_map_norms_sq.end(), 0.0);
  return sum / static_cast<double>(grad_map_norms_sq.size());
}

std::vector<double> inner_grad_map_norms(const RunTrace& trace, std::size_t outer_limit) {
  std::vector<double> out;
  for (const Checkpoint& c : trace.checkpoints) {
    if (c.tau >= outer_limit) continue;
    if (!c.grad_map_norm_sq) throw InvalidArgument("trace has checkpoints without gradient mapping");
    out.push_back(*c.grad_map_norm_sq);
  }
  return out;
}

std::vector<double> step_curve(const RunTrace& trace, std::span<const std::uint64_t> grid, double offset) {
  if (trace.checkpoints.empty()) throw InvalidArgument("step_curve needs a non-empty trace");
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t next = 0;
  for (const std::uint64_t e : grid) {
    while (next + 1 < trace.checkpoints.size() && trace.checkpoints[next + 1].evals <= e) ++next;
    out.push_back(trace.checkpoints[next].f_value - offset);
  }
  return out;
}

}  // namespace vrszd
