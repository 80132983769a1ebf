#include "vrszd/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrszd/error.hpp"

namespace vrszd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ProxTerm ProxTerm::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("L1 weight must be finite and >= 0");
  return ProxTerm(L1{lambda});
}

ProxTerm ProxTerm::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw InvalidArgument("box bounds have different sizes");
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (std::isnan(lo[j]) || std::isnan(hi[j]) || lo[j] > hi[j]) {
      throw InvalidArgument("box bound lo > hi at coordinate " + std::to_string(j));
    }
  }
  return ProxTerm(Box{std::move(lo), std::move(hi)});
}

double ProxTerm::evaluate(std::span<const double> x) const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [&](const L1& t) {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return t.lambda * s;
          },
          [&](const Box& t) {
            if (t.lo.size() != x.size()) throw InvalidArgument("box dimension mismatch");
            for (std::size_t j = 0; j < x.size(); ++j) {
              if (x[j] < t.lo[j] || x[j] > t.hi[j]) return std::numeric_limits<double>::infinity();
            }
            return 0.0;
          },
      },
      term_);
}

void ProxTerm::apply_inplace(std::span<double> x, double gamma) const {
  if (!(gamma > 0.0)) throw InvalidArgument("prox stepsize must be > 0");
  std::visit(overloaded{
                 [](const Zero&) {},
                 [&](const L1& t) {
                   const double threshold = gamma * t.lambda;
                   for (double& v : x) {
                     const double shrunk = std::max(std::abs(v) - threshold, 0.0);
                     v = std::copysign(shrunk, v);
                   }
                 },
                 [&](const Box& t) {
                   if (t.lo.size() != x.size()) throw InvalidArgument("box dimension mismatch");
                   for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], t.lo[j], t.hi[j]);
                 },
             },
             term_);
}

Vector prox_apply(const ProxTerm& h, std::span<const double> x, double gamma) {
  Vector out(x.begin(), x.end());
  h.apply_inplace(out, gamma);
  return out;
}

}  // namespace vrszd
