#include "tubeforge/moran.hpp"

#include <cmath>

#include "tubeforge/errors.hpp"

namespace tubeforge {

namespace {

constexpr double kResidualTarget = 1e-13;
constexpr int kBisectionSteps = 30;
constexpr int kMaxNewtonSteps = 100;

}  // namespace

double real_dirichlet_sum(const RatioList& ratios, double x) { return ratios.power_sum(x); }

SimilarityDimension similarity_dimension(const RatioList& ratios) {
  const auto& terms = ratios.distinct();
  auto excess = [&](double x) { return ratios.power_sum(x) - 1.0; };
  auto slope = [&](double x) {
    double d = 0.0;
    for (const auto& t : terms) d += t.multiplicity * t.log_ratio * std::exp(x * t.log_ratio);
    return d;
  };

  SimilarityDimension result;
  if (ratios.size() == 1) {
    // r^0 = 1 for any single ratio.
    result.value = 0.0;
    return result;
  }

  // sum(0) = J > 1; double the upper end until the sum falls below 1.
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    ++result.iterations;
    if (hi > 1e300) throw Error(ErrorKind::Convergence, "cannot bracket the similarity dimension");
  }

  if (excess(hi) == 0.0) {
    result.value = hi;
    return result;
  }
  for (int k = 0; k < kBisectionSteps; ++k, ++result.iterations) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }

  double x = 0.5 * (lo + hi);
  double fx = excess(x);
  for (int k = 0; k < kMaxNewtonSteps && std::abs(fx) >= kResidualTarget; ++k) {
    ++result.iterations;
    double next = x - fx / slope(x);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double fn = excess(next);
    (fn > 0.0 ? lo : hi) = next;
    if (next == x) break;
    x = next;
    fx = fn;
  }

  if (std::abs(fx) >= kResidualTarget) {
    throw Error(ErrorKind::Convergence, "similarity dimension residual did not reach 1e-13");
  }
  result.value = x;
  result.residual = std::abs(fx);
  return result;
}

}  // namespace tubeforge
