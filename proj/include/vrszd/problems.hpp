#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "vrszd/linalg.hpp"
#include "vrszd/prox.hpp"
#include "vrszd/rng.hpp"

namespace vrszd {

/// Monotone counter of single-component evaluations with an optional cap.
class EvalLedger {
 public:
  EvalLedger() = default;
  explicit EvalLedger(std::optional<std::uint64_t> budget);

  std::uint64_t count() const { return count_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  std::uint64_t remaining() const;
  bool can_afford(std::uint64_t cost) const;

  // Throws BudgetExhausted, leaving the count untouched, if cost does not fit.
  void charge(std::uint64_t cost);

 private:
  std::uint64_t count_ = 0;
  std::optional<std::uint64_t> budget_;
};

/// Finite-sum composite objective F = (1/n) sum_i f_i + h. Only component
/// values are exposed to the optimizers; the analytic gradient, when present,
/// is reserved for diagnostics and tests.
class Problem {
 public:
  using ComponentFn = std::function<double(std::size_t, std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
  using ValueFn = std::function<double(std::span<const double>)>;

  Problem(std::string name, std::size_t n, std::size_t d, ComponentFn component, ProxTerm h);

  const std::string& name() const { return name_; }
  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  const ProxTerm& h() const { return h_; }

  // f_i(x), uncharged.
  double component(std::size_t i, std::span<const double> x) const { return component_(i, x); }
  // f_i(x), charges one evaluation.
  double component(std::size_t i, std::span<const double> x, EvalLedger& ledger) const;
  // (1/n) sum_i f_i(x), charges n evaluations.
  double average(std::span<const double> x, EvalLedger& ledger) const;
  // (1/n) sum_i f_i(x), uncharged.
  double smooth_value(std::span<const double> x) const;

  std::optional<double> known_min() const { return known_min_; }
  // Per-component smoothness constant (every f_i is L-smooth).
  std::optional<double> lipschitz() const { return lipschitz_; }
  // Smoothness constant of the average f, when known separately.
  std::optional<double> full_lipschitz() const { return full_lipschitz_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }
  void gradient(std::span<const double> x, std::span<double> out) const;
  // Monolithic evaluation of f used to cross-check the finite sum.
  bool has_direct_value() const { return static_cast<bool>(direct_value_); }
  double direct_value(std::span<const double> x) const;

  Problem& with_known_min(double v) { known_min_ = v; return *this; }
  Problem& with_lipschitz(double v) { lipschitz_ = v; return *this; }
  Problem& with_full_lipschitz(double v) { full_lipschitz_ = v; return *this; }
  Problem& with_gradient(GradientFn g) { gradient_ = std::move(g); return *this; }
  Problem& with_direct_value(ValueFn f) { direct_value_ = std::move(f); return *this; }

  void check_dimension(std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t n_;
  std::size_t d_;
  ComponentFn component_;
  ProxTerm h_;
  std::optional<double> known_min_;
  std::optional<double> lipschitz_;
  std::optional<double> full_lipschitz_;
  GradientFn gradient_;
  ValueFn direct_value_;
};

// F(x) = f(x) + h(x). Never charged to a ledger.
double evaluate_full(const Problem& p, std::span<const double> x);

// A = U diag(linspace(cond_min, cond_max)) V^T from the SVD of a standard
// normal d x d matrix.
Matrix make_lasso_matrix(std::size_t d, double cond_min, double cond_max, RandomStream& rng);

// 0.5 ||Ax - y||^2 + lambda ||x||_1 split as f_i(x) = (n/2)(a_i^T x - y_i)^2.
Problem lasso_problem(Matrix a, Vector y, double lambda);

// LASSO with y = 0, so x* = 0 and min F = 0.
Problem make_lasso(std::size_t d, double lambda, double cond_min, double cond_max, RandomStream& rng);

enum class LogisticLink {
  Literal,  // cross-entropy applied directly to w^T x, clamped into (0, 1)
  Sigmoid,  // cross-entropy of sigmoid(w^T x)
};

inline constexpr double kPredictionClamp = 1e-12;

// (1/n) sum_i CE(w^T x_i, y_i) + lambda ||w||_1 with labels in {0, 1}.
Problem make_logistic_l1(const Matrix& x, const Vector& labels, double lambda,
                         LogisticLink link = LogisticLink::Literal);

// Smooth non-convex sum of double wells:
// f_i(x) = (1/4) sum_j ((x_j - c_ij)^2 - 1)^2 with c_ij uniform in [-1, 1].
// The recorded Lipschitz constant holds on the box [-radius, radius]^d.
Problem make_quartic_sum(std::size_t n, std::size_t d, RandomStream& rng, double radius = 2.0);

// f_i(x) = 0.5 x^T H_i x + c_i^T x with H_i = B_i^T B_i / d + 0.1 I.
Problem make_quadratic_sum(std::size_t n, std::size_t d, RandomStream& rng);

}  // namespace vrszd
