#include "tubeforge/verification.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "tubeforge/direct.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/summation.hpp"

namespace tubeforge::verification {

namespace {

using cplx = std::complex<double>;

// Integral over [0, length] of a complex integrand, real and imaginary
// parts separately.
template <class F>
cplx integrate(F integrand, double length) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kMaxDepth = 25;
  constexpr double kTolerance = 1e-13;
  const double re = gauss_kronrod<double, 61>::integrate(
      [&](double x) { return integrand(x).real(); }, 0.0, length, kMaxDepth, kTolerance);
  const double im = gauss_kronrod<double, 61>::integrate(
      [&](double x) { return integrand(x).imag(); }, 0.0, length, kMaxDepth, kTolerance);
  return {re, im};
}

}  // namespace

cplx mellin_numerator_quadrature(const MonophaseGenerator& gen, cplx s) {
  const int n = gen.dimension();
  const double g = gen.inradius();
  const double inner_rate = s.real() - (n - 1);
  const double outer_rate = n - s.real();
  if (!(inner_rate > 0.0 && outer_rate > 0.0)) {
    throw Error(ErrorKind::Domain, "quadrature oracle needs n-1 < Re s < n");
  }
  // Past this many decay lengths the integrand is below 1e-17 of its size.
  constexpr double kDecayLengths = 40.0;

  // eps = g e^{-x} on (0, g): integrand P(eps) eps^{s-n}, decays like e^{-x inner_rate}.
  const cplx inner = integrate(
      [&](double x) {
        const double eps = g * std::exp(-x);
        return gen.polynomial(eps) * std::exp((s - static_cast<double>(n)) * std::log(eps));
      },
      kDecayLengths / inner_rate);
  // eps = g e^{x} on (g, inf): integrand Vol eps^{s-n}, decays like e^{-x outer_rate}.
  const cplx outer = integrate(
      [&](double x) {
        const double eps = g * std::exp(x);
        return gen.volume() * std::exp((s - static_cast<double>(n)) * std::log(eps));
      },
      kDecayLengths / outer_rate);
  return inner + outer;
}

double direct_tube_volume_by_words(const SprayModel& model, double eps) {
  const int n = model.dimension();
  const double g = model.inradius();
  const double all = 1.0 / (1.0 - model.ratios.power_sum(n));
  CompensatedSum volume, enumerated;
  if (eps / g < 1.0) {
    for (const ScalingWord& w : enumerate_words(model.ratios, eps / g)) {
      const double scale = std::pow(w.factor, n);
      volume += scale * generator_tube_volume(model.generator, eps / w.factor);
      enumerated += scale;
    }
  }
  volume += model.generator.volume() * (all - enumerated.value());
  return volume.value();
}

double similarity_dimension_by_bisection(const RatioList& ratios) {
  auto sum = [&](double x) {
    double s = 0.0;
    for (double r : ratios.values()) s += std::pow(r, x);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (sum(hi) > 1.0) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (sum(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tubeforge::verification
