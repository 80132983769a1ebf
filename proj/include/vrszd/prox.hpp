#pragma once

#include <span>
#include <variant>

#include "vrszd/linalg.hpp"

namespace vrszd {

/// Proximable non-smooth term h of the composite objective.
class ProxTerm {
 public:
  struct Zero {};
  struct L1 {
    double lambda;
  };
  struct Box {
    Vector lo;
    Vector hi;
  };

  static ProxTerm zero() { return ProxTerm(Zero{}); }
  static ProxTerm l1(double lambda);
  static ProxTerm box(Vector lo, Vector hi);

  // h(x); +infinity outside the box for the indicator.
  double evaluate(std::span<const double> x) const;

  // prox_{gamma h}(x) written into x.
  void apply_inplace(std::span<double> x, double gamma) const;

  const std::variant<Zero, L1, Box>& term() const { return term_; }
  bool is_zero() const { return std::holds_alternative<Zero>(term_); }

 private:
  explicit ProxTerm(std::variant<Zero, L1, Box> term) : term_(std::move(term)) {}

  std::variant<Zero, L1, Box> term_;
};

// argmin_y h(y) + ||y - x||^2 / (2 gamma); gamma > 0.
Vector prox_apply(const ProxTerm& h, std::span<const double> x, double gamma);

}  // namespace vrszd
