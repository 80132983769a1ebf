#include "vrszd/problems.hpp"

#include <algorithm>
#include <cmath>

#include "vrszd/error.hpp"

namespace vrszd {

EvalLedger::EvalLedger(std::optional<std::uint64_t> budget) : budget_(budget) {
  if (budget_ && *budget_ == 0) throw InvalidArgument("budget must be positive");
}

std::uint64_t EvalLedger::remaining() const {
  if (!budget_) return UINT64_MAX;
  return *budget_ - count_;
}

bool EvalLedger::can_afford(std::uint64_t cost) const { return cost <= remaining(); }

void EvalLedger::charge(std::uint64_t cost) {
  if (!can_afford(cost)) throw BudgetExhausted(cost, remaining());
  count_ += cost;
}

Problem::Problem(std::string name, std::size_t n, std::size_t d, ComponentFn component, ProxTerm h)
    : name_(std::move(name)), n_(n), d_(d), component_(std::move(component)), h_(std::move(h)) {
  if (n_ == 0 || d_ == 0) throw InvalidArgument("problem needs n >= 1 and d >= 1");
  if (!component_) throw InvalidArgument("problem needs a component evaluator");
  if (const auto* box = std::get_if<ProxTerm::Box>(&h_.term()); box && box->lo.size() != d_) {
    throw InvalidArgument("box term dimension does not match problem dimension");
  }
}

void Problem::check_dimension(std::span<const double> x) const {
  if (x.size() != d_) {
    throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", problem has d=" +
                          std::to_string(d_));
  }
}

double Problem::component(std::size_t i, std::span<const double> x, EvalLedger& ledger) const {
  if (i >= n_) throw InvalidArgument("component index out of range");
  check_dimension(x);
  ledger.charge(1);
  return component_(i, x);
}

double Problem::average(std::span<const double> x, EvalLedger& ledger) const {
  check_dimension(x);
  ledger.charge(n_);
  return smooth_value(x);
}

double Problem::smooth_value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += component_(i, x);
  return s / static_cast<double>(n_);
}

void Problem::gradient(std::span<const double> x, std::span<double> out) const {
  if (!gradient_) throw InvalidArgument("problem " + name_ + " has no analytic gradient");
  check_dimension(x);
  if (out.size() != d_) throw InvalidArgument("gradient output has wrong dimension");
  gradient_(x, out);
}

double Problem::direct_value(std::span<const double> x) const {
  if (!direct_value_) throw InvalidArgument("problem " + name_ + " has no direct evaluator");
  check_dimension(x);
  return direct_value_(x);
}

double evaluate_full(const Problem& p, std::span<const double> x) {
  p.check_dimension(x);
  return p.smooth_value(x) + p.h().evaluate(x);
}

Matrix make_lasso_matrix(std::size_t d, double cond_min, double cond_max, RandomStream& rng) {
  if (d == 0) throw InvalidArgument("make_lasso: d must be >= 1");
  if (!(cond_min > 0.0) || !(cond_max >= cond_min)) {
    throw InvalidArgument("make_lasso: need 0 < cond_min <= cond_max");
  }
  Matrix gaussian(d, d);
  for (double& v : gaussian.data()) v = rng.normal();
  Svd dec = svd(gaussian);
  // Largest singular value first, matching the ordering returned by svd.
  Matrix scaled = dec.u;
  for (std::size_t j = 0; j < d; ++j) {
    const double t = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
    const double s = cond_max + (cond_min - cond_max) * t;
    for (std::size_t i = 0; i < d; ++i) scaled(i, j) *= s;
  }
  return matmul(scaled, transpose(dec.v));
}

Problem lasso_problem(Matrix a, Vector y, double lambda) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (y.size() != n) throw InvalidArgument("lasso: y has wrong length");

  double max_row_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_row_sq = std::max(max_row_sq, squared_norm(a.row(i)));
  const double sigma_max = n >= d ? svd(a).sigma.front() : svd(transpose(a)).sigma.front();

  auto data = std::make_shared<const std::pair<Matrix, Vector>>(std::move(a), std::move(y));
  const double weight = static_cast<double>(n) / 2.0;
  Problem p(
      "lasso", n, d,
      [data, weight](std::size_t i, std::span<const double> x) {
        const double r = dot(data->first.row(i), x) - data->second[i];
        return weight * r * r;
      },
      ProxTerm::l1(lambda));
  p.with_lipschitz(static_cast<double>(n) * max_row_sq)
      .with_full_lipschitz(sigma_max * sigma_max)
      .with_gradient([data](std::span<const double> x, std::span<double> out) {
        Vector r = matvec(data->first, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= data->second[i];
        const Vector g = matvec_transposed(data->first, r);
        std::copy(g.begin(), g.end(), out.begin());
      })
      .with_direct_value([data](std::span<const double> x) {
        Vector r = matvec(data->first, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= data->second[i];
        return 0.5 * squared_norm(r);
      });
  return p;
}

Problem make_lasso(std::size_t d, double lambda, double cond_min, double cond_max, RandomStream& rng) {
  Problem p = lasso_problem(make_lasso_matrix(d, cond_min, cond_max, rng), Vector(d, 0.0), lambda);
  p.with_known_min(0.0);
  return p;
}

namespace {

struct LogisticData {
  Matrix x;
  Vector labels;
  LogisticLink link;
};

double clamp_prediction(double p) { return std::clamp(p, kPredictionClamp, 1.0 - kPredictionClamp); }

double prediction(const LogisticData& data, double z) {
  return data.link == LogisticLink::Literal ? z : 1.0 / (1.0 + std::exp(-z));
}

double cross_entropy(double p, double y) { return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)); }

}  // namespace

Problem make_logistic_l1(const Matrix& x, const Vector& labels, double lambda, LogisticLink link) {
  if (labels.size() != x.rows()) throw DataError("logistic: label count does not match rows");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw DataError("logistic: label at row " + std::to_string(i) + " is not in {0, 1}");
    }
  }
  auto data = std::make_shared<const LogisticData>(LogisticData{x, labels, link});
  Problem p(
      link == LogisticLink::Literal ? "logistic" : "logistic_sigmoid", x.rows(), x.cols(),
      [data](std::size_t i, std::span<const double> w) {
        const double z = dot(data->x.row(i), w);
        return cross_entropy(clamp_prediction(prediction(*data, z)), data->labels[i]);
      },
      ProxTerm::l1(lambda));
  p.with_gradient([data](std::span<const double> w, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t n = data->x.rows();
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dot(data->x.row(i), w);
      const double y = data->labels[i];
      double dz = 0.0;
      if (data->link == LogisticLink::Literal) {
        // The clamp is flat outside (eps, 1 - eps).
        if (z > kPredictionClamp && z < 1.0 - kPredictionClamp) dz = -y / z + (1.0 - y) / (1.0 - z);
      } else {
        dz = 1.0 / (1.0 + std::exp(-z)) - y;
      }
      axpy(dz / static_cast<double>(n), data->x.row(i), out);
    }
  });
  return p;
}

Problem make_quartic_sum(std::size_t n, std::size_t d, RandomStream& rng, double radius) {
  auto centers = std::make_shared<Matrix>(n, d);
  for (double& c : centers->data()) c = rng.uniform(-1.0, 1.0);
  std::shared_ptr<const Matrix> c = centers;
  Problem p(
      "quartic", n, d,
      [c](std::size_t i, std::span<const double> x) {
        double s = 0.0;
        const auto ci = c->row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double t = (x[j] - ci[j]) * (x[j] - ci[j]) - 1.0;
          s += t * t;
        }
        return 0.25 * s;
      },
      ProxTerm::zero());
  const double reach = radius + 1.0;
  p.with_lipschitz(std::max(3.0 * reach * reach - 1.0, 1.0))
      .with_gradient([c](std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        const std::size_t rows = c->rows();
        for (std::size_t i = 0; i < rows; ++i) {
          const auto ci = c->row(i);
          for (std::size_t j = 0; j < x.size(); ++j) {
            const double u = x[j] - ci[j];
            out[j] += u * (u * u - 1.0);
          }
        }
        scale(1.0 / static_cast<double>(rows), out);
      });
  return p;
}

Problem make_quadratic_sum(std::size_t n, std::size_t d, RandomStream& rng) {
  struct Quadratics {
    std::vector<Matrix> hessians;
    Matrix linear;
    Matrix mean_hessian;
    Vector mean_linear;
  };
  auto q = std::make_shared<Quadratics>();
  q->linear = Matrix(n, d);
  q->mean_hessian = Matrix(d, d);
  q->mean_linear = Vector(d, 0.0);
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix b(d, d);
    for (double& v : b.data()) v = rng.normal();
    Matrix h = matmul(transpose(b), b);
    for (double& v : h.data()) v /= static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) h(j, j) += 0.1;
    lipschitz = std::max(lipschitz, svd(h).sigma.front());
    for (std::size_t k = 0; k < d * d; ++k) q->mean_hessian.data()[k] += h.data()[k] / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      q->linear(i, j) = rng.normal();
      q->mean_linear[j] += q->linear(i, j) / static_cast<double>(n);
    }
    q->hessians.push_back(std::move(h));
  }
  std::shared_ptr<const Quadratics> data = q;
  Problem p(
      "quadratic", n, d,
      [data](std::size_t i, std::span<const double> x) {
        const Vector hx = matvec(data->hessians[i], x);
        return 0.5 * dot(x, hx) + dot(data->linear.row(i), x);
      },
      ProxTerm::zero());
  p.with_lipschitz(lipschitz).with_gradient([data](std::span<const double> x, std::span<double> out) {
    const Vector g = matvec(data->mean_hessian, x);
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = g[j] + data->mean_linear[j];
  });
  return p;
}

}  // namespace vrszd
