#include "vrszd/estimators.hpp"

#include <cmath>
#include <string>

#include "vrszd/error.hpp"

namespace vrszd {

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta < kMinBeta) {
    throw InvalidArgument("discretization beta=" + std::to_string(beta) + " below floor 1e-12");
  }
}

FullSurrogate full_fd_gradient(const Problem& p, std::span<const double> x, double beta, EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  const std::size_t d = p.d();
  const std::uint64_t cost = static_cast<std::uint64_t>(p.n()) * (d + 1);
  ledger.charge(cost);

  FullSurrogate out{Vector(d), beta, cost};
  const double f0 = p.smooth_value(x);
  Vector shifted(x.begin(), x.end());
  for (std::size_t j = 0; j < d; ++j) {
    shifted[j] = x[j] + beta;
    out.g[j] = (p.smooth_value(shifted) - f0) / beta;
    shifted[j] = x[j];
  }
  return out;
}

void accumulate_structured(const Problem& p, std::size_t i, std::span<const double> x,
                           const DirectionSet& frame, double beta, double weight, std::span<double> out,
                           EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  if (i >= p.n()) throw InvalidArgument("component index out of range");
  if (frame.dim() != p.d() || out.size() != p.d()) throw InvalidArgument("frame dimension mismatch");
  const std::size_t d = p.d();
  const std::size_t l = frame.size();
  ledger.charge(l + 1);

  const double f0 = p.component(i, x);
  Vector sum(d, 0.0);
  Vector shifted(d);
  for (std::size_t j = 0; j < l; ++j) {
    const auto v = frame.column(j);
    for (std::size_t k = 0; k < d; ++k) shifted[k] = x[k] + beta * v[k];
    axpy((p.component(i, shifted) - f0) / beta, v, sum);
  }
  // d/l applied once to the accumulated sum.
  axpy(weight * (static_cast<double>(d) / static_cast<double>(l)), sum, out);
}

StochasticSurrogate structured_stoch_gradient(const Problem& p, std::size_t i, std::span<const double> x,
                                              const DirectionSet& frame, double beta, EvalLedger& ledger) {
  StochasticSurrogate out{Vector(p.d(), 0.0), i, beta, frame.size() + 1};
  accumulate_structured(p, i, x, frame, beta, 1.0, out.g, ledger);
  return out;
}

Vector central_fd_gradient(const Problem& p, std::span<const double> x, double beta, EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  const std::size_t d = p.d();
  ledger.charge(2 * static_cast<std::uint64_t>(p.n()) * d);
  Vector g(d);
  Vector shifted(x.begin(), x.end());
  for (std::size_t j = 0; j < d; ++j) {
    shifted[j] = x[j] + beta;
    const double fp = p.smooth_value(shifted);
    shifted[j] = x[j] - beta;
    const double fm = p.smooth_value(shifted);
    shifted[j] = x[j];
    g[j] = (fp - fm) / (2.0 * beta);
  }
  return g;
}

void accumulate_central_sphere(const Problem& p, std::size_t i, std::span<const double> x,
                               std::span<const double> v, double beta, double weight, std::span<double> out,
                               EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  if (i >= p.n()) throw InvalidArgument("component index out of range");
  if (v.size() != p.d() || out.size() != p.d()) throw InvalidArgument("direction dimension mismatch");
  const std::size_t d = p.d();
  ledger.charge(2);
  Vector plus(d), minus(d);
  for (std::size_t k = 0; k < d; ++k) {
    plus[k] = x[k] + beta * v[k];
    minus[k] = x[k] - beta * v[k];
  }
  const double slope = (p.component(i, plus) - p.component(i, minus)) / (2.0 * beta);
  axpy(weight * static_cast<double>(d) * slope, v, out);
}

void accumulate_central_coordinates(const Problem& p, std::size_t i, std::span<const double> x, double beta,
                                    double weight, std::span<double> out, EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  if (i >= p.n()) throw InvalidArgument("component index out of range");
  if (out.size() != p.d()) throw InvalidArgument("output dimension mismatch");
  const std::size_t d = p.d();
  ledger.charge(2 * static_cast<std::uint64_t>(d));
  Vector shifted(x.begin(), x.end());
  for (std::size_t j = 0; j < d; ++j) {
    shifted[j] = x[j] + beta;
    const double fp = p.component(i, shifted);
    shifted[j] = x[j] - beta;
    const double fm = p.component(i, shifted);
    shifted[j] = x[j];
    out[j] += weight * (fp - fm) / (2.0 * beta);
  }
}

Vector gaussian_stoch_gradient(const Problem& p, std::size_t i, std::span<const double> x, std::size_t l,
                               double beta, RandomStream& rng, EvalLedger& ledger) {
  check_beta(beta);
  p.check_dimension(x);
  if (i >= p.n()) throw InvalidArgument("component index out of range");
  if (l == 0) throw InvalidArgument("gaussian estimator needs l >= 1");
  const std::size_t d = p.d();
  ledger.charge(l + 1);
  const double f0 = p.component(i, x);
  Vector g(d, 0.0);
  Vector u(d), shifted(d);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      u[k] = rng.normal();
      shifted[k] = x[k] + beta * u[k];
    }
    axpy((p.component(i, shifted) - f0) / beta, u, g);
  }
  scale(1.0 / static_cast<double>(l), g);
  return g;
}

Vector sample_unit_ball(std::size_t d, RandomStream& rng) {
  Vector u(d);
  double norm = 0.0;
  do {
    for (double& v : u) v = rng.normal();
    norm = norm2(u);
  } while (norm == 0.0);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  scale(radius / norm, u);
  return u;
}

SmoothedEstimate smoothed_value(const Problem& p, std::span<const double> x, double beta,
                                std::size_t n_samples, RandomStream& rng) {
  p.check_dimension(x);
  if (n_samples == 0) throw InvalidArgument("smoothed_value needs at least one sample");
  if (!(beta >= 0.0)) throw InvalidArgument("smoothed_value needs beta >= 0");
  const std::size_t d = p.d();
  double mean = 0.0;
  double m2 = 0.0;
  Vector shifted(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Vector u = sample_unit_ball(d, rng);
    for (std::size_t k = 0; k < d; ++k) shifted[k] = x[k] + beta * u[k];
    const double v = p.smooth_value(shifted);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double var = n_samples > 1 ? m2 / static_cast<double>(n_samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

}  // namespace vrszd
