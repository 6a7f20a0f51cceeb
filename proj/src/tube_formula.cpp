#include "tubeforge/tube_formula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "format.hpp"
#include "tubeforge/direct.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/parallel.hpp"
#include "tubeforge/summation.hpp"

namespace tubeforge {

using detail::fmt17;
using std::numbers::pi;

namespace {

constexpr double kPoleDistance = 1e-12;
constexpr double kSimpleZeroSlope = 1e-8;
constexpr double kRealTolerance = 1e-9;
constexpr double kPairTolerance = 1e-8;
constexpr int kContourDoublings = 20;
constexpr double kContourTolerance = 1e-10;

// eps^{n-s}
cplx tube_power(int n, double eps, cplx s) { return std::exp((static_cast<double>(n) - s) * std::log(eps)); }

// Singularities of eps^{n-s} N(s) / f(s) other than the zeros of f.
std::vector<cplx> numerator_poles(const MonophaseGenerator& gen) {
  std::vector<cplx> poles;
  for (int i = 0; i <= gen.dimension(); ++i) {
    if (gen.coefficient(i) != 0.0) poles.emplace_back(i, 0.0);
  }
  return poles;
}

double separation(const ComplexDimension& omega, const std::vector<ComplexDimension>& others,
                  const std::vector<cplx>& poles) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : others) {
    const double d = std::abs(z.omega - omega.omega);
    if (d > 0.0) best = std::min(best, d);
  }
  for (cplx p : poles) best = std::min(best, std::abs(p - omega.omega));
  return best;
}

double fallback_radius(double sep) { return std::isfinite(sep) ? std::min(0.4 * sep, 0.1) : 0.1; }

void require_tube_domain(const SprayModel& model, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  if (eps >= model.inradius()) {
    throw Error(ErrorKind::Domain, "residue formula stated only for eps < g (eps = " + fmt17(eps) +
                                       ", g = " + fmt17(model.inradius()) + ")");
  }
}

}  // namespace

cplx mellin_numerator(const MonophaseGenerator& gen, cplx s) {
  const double log_g = std::log(gen.inradius());
  CompensatedComplexSum sum;
  for (int i = 0; i <= gen.dimension(); ++i) {
    const double k = gen.coefficient(i);
    if (k == 0.0) continue;
    const cplx shifted = s - static_cast<double>(i);
    if (std::abs(shifted) < kPoleDistance) {
      throw Error(ErrorKind::PoleProximity, "Mellin numerator evaluated at its pole s = " +
                                                std::to_string(i));
    }
    sum += k * std::exp(shifted * log_g) / shifted;
  }
  return sum.value();
}

double integer_pole_residue(const SprayModel& model, int i, double eps) {
  const int n = model.dimension();
  if (i < 0 || i >= n) throw Error(ErrorKind::Domain, "integer pole index must be in 0..n-1");
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  const double k = model.generator.coefficient(i);
  if (k == 0.0) return 0.0;
  return std::pow(eps, n - i) * k / (1.0 - model.ratios.power_sum(i));
}

cplx contour_residue(const SprayModel& model, cplx center, double radius, double eps) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Domain, "contour radius must be positive");
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  const int n = model.dimension();
  const DirichletPolynomial f(model.ratios);

  // (1 / 2 pi i) \oint h ds = (1 / 2 pi) \int_0^{2 pi} h(c + rho e^{it}) rho e^{it} dt
  auto sample = [&](double theta) {
    const cplx arm = std::polar(radius, theta);
    const cplx s = center + arm;
    return tube_power(n, eps, s) * mellin_numerator(model.generator, s) / f.value(s) * arm;
  };

  std::size_t m = 16;
  CompensatedComplexSum total;
  double peak = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const cplx v = sample(2.0 * pi * static_cast<double>(k) / static_cast<double>(m));
    peak = std::max(peak, std::abs(v));
    total += v;
  }
  cplx estimate = total.value() / static_cast<double>(m);

  for (int level = 0; level < kContourDoublings; ++level) {
    // Odd nodes of the doubled grid.
    for (std::size_t k = 0; k < m; ++k) {
      const cplx v = sample(2.0 * pi * (static_cast<double>(k) + 0.5) / static_cast<double>(m));
      peak = std::max(peak, std::abs(v));
      total += v;
    }
    m *= 2;
    const cplx next = total.value() / static_cast<double>(m);
    const double scale = std::max(std::abs(next), 1e-4 * peak);
    if (std::abs(next - estimate) <= kContourTolerance * scale) return next;
    estimate = next;
  }
  throw Error(ErrorKind::Convergence, "contour residue did not converge after 20 refinements");
}

ResidueTerm zero_residue(const SprayModel& model, const ComplexDimension& omega, double eps,
                         const std::vector<ComplexDimension>& others) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  const DirichletPolynomial f(model.ratios);
  const cplx slope = f.derivative(omega.omega);
  if (omega.multiplicity == 1 && std::abs(slope) >= kSimpleZeroSlope) {
    const cplx value = tube_power(model.dimension(), eps, omega.omega) *
                       mellin_numerator(model.generator, omega.omega) / slope;
    return {omega.omega, value, ResidueKind::SimpleZero};
  }
  const double radius =
      fallback_radius(separation(omega, others, numerator_poles(model.generator)));
  return {omega.omega, contour_residue(model, omega.omega, radius, eps),
          ResidueKind::ContourFallback};
}

ResidueTubeFormula::ResidueTubeFormula(SprayModel model, ZeroSearch search)
    : model_(std::move(model)), window_(std::abs(search.window.im_hi)) {
  const DirichletPolynomial f(model_.ratios);
  const auto poles = numerator_poles(model_.generator);
  const auto& zeros = search.zeros;

  auto coefficient = [&](const ComplexDimension& z) {
    Coefficient c{z, 0.0, false, 0.0};
    const cplx slope = f.derivative(z.omega);
    if (z.multiplicity == 1 && std::abs(slope) >= kSimpleZeroSlope) {
      c.weight = mellin_numerator(model_.generator, z.omega) / slope;
    } else {
      c.fallback = true;
      c.radius = fallback_radius(separation(z, zeros, poles));
    }
    return c;
  };

  std::vector<const ComplexDimension*> upper, lower;
  for (const auto& z : zeros) {
    const double im = z.omega.imag();
    if (std::abs(im) <= kRealTolerance) {
      real_zeros_.push_back(coefficient(z));
    } else {
      (im > 0.0 ? upper : lower).push_back(&z);
    }
  }

  std::sort(upper.begin(), upper.end(), [](const ComplexDimension* a, const ComplexDimension* b) {
    if (a->omega.imag() != b->omega.imag()) return a->omega.imag() < b->omega.imag();
    return a->omega.real() < b->omega.real();
  });
  std::vector<bool> taken(lower.size(), false);
  for (const ComplexDimension* z : upper) {
    std::size_t best = lower.size();
    double best_distance = kPairTolerance;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      const double d = std::abs(lower[k]->omega - std::conj(z->omega));
      if (!taken[k] && d < best_distance) {
        best = k;
        best_distance = d;
      }
    }
    if (best == lower.size()) {
      // A pair cut by the window edge ends the usable sequence.
      if (z->omega.imag() > window_ - 1e-6) break;
      throw Error(ErrorKind::Window, "complex dimension " + fmt17(z->omega.real()) + " + " +
                                         fmt17(z->omega.imag()) + "i has no conjugate partner");
    }
    taken[best] = true;
    pairs_.emplace_back(coefficient(*z), coefficient(*lower[best]));
  }
}

cplx ResidueTubeFormula::term(const Coefficient& c, double eps) const {
  if (c.fallback) return contour_residue(model_, c.zero.omega, c.radius, eps);
  return tube_power(model_.dimension(), eps, c.zero.omega) * c.weight;
}

std::vector<ResidueTerm> ResidueTubeFormula::terms(double eps, int pairs) const {
  require_tube_domain(model_, eps);
  if (pairs < 0 || pairs > available_pairs()) {
    throw Error(ErrorKind::Window, "requested " + std::to_string(pairs) + " pairs but only " +
                                       std::to_string(available_pairs()) + " lie in the window");
  }
  auto kind = [](const Coefficient& c) {
    return c.fallback ? ResidueKind::ContourFallback : ResidueKind::SimpleZero;
  };
  std::vector<ResidueTerm> out;
  for (int i = 0; i < model_.dimension(); ++i) {
    out.push_back({cplx(i, 0.0), integer_pole_residue(model_, i, eps), ResidueKind::IntegerPole});
  }
  for (const auto& c : real_zeros_) out.push_back({c.zero.omega, term(c, eps), kind(c)});
  for (int k = 0; k < pairs; ++k) {
    const auto& [up, down] = pairs_[static_cast<std::size_t>(k)];
    out.push_back({up.zero.omega, term(up, eps), kind(up)});
    out.push_back({down.zero.omega, term(down, eps), kind(down)});
  }
  return out;
}

TubeEvaluation ResidueTubeFormula::evaluate(double eps, int pairs) const {
  require_tube_domain(model_, eps);
  if (pairs < 0 || pairs > available_pairs()) {
    throw Error(ErrorKind::Window, "requested " + std::to_string(pairs) + " pairs but only " +
                                       std::to_string(available_pairs()) + " lie in the window");
  }

  TubeEvaluation out;
  out.epsilon = eps;
  out.window = window_;
  out.pairs_used = pairs;
  out.direct = direct_tube_volume(model_, eps);

  CompensatedComplexSum sum;
  for (int i = 0; i < model_.dimension(); ++i) sum += integer_pole_residue(model_, i, eps);
  for (const auto& c : real_zeros_) sum += term(c, eps);

  auto record = [&] {
    const cplx v = sum.value();
    out.partial_sums.push_back(v.real());
    out.leakage.push_back(std::abs(v.imag()));
  };
  record();
  for (int k = 0; k < pairs; ++k) {
    const auto& [up, down] = pairs_[static_cast<std::size_t>(k)];
    sum += term(up, eps) + term(down, eps);
    record();
  }
  return out;
}

double window_for_pairs(const RatioList& ratios, int pairs) {
  // Zeros per unit height in the upper half plane: ln(1 / r_min) / 2 pi.
  const double density = std::log(1.0 / ratios.min()) / (2.0 * pi);
  return (pairs + 1.5) / density;
}

ResidueTubeFormula build_residue_formula(const SprayModel& model, int pairs,
                                         std::optional<double> window) {
  if (pairs < 0) throw Error(ErrorKind::Domain, "number of pairs must be non-negative");
  if (window) {
    ResidueTubeFormula formula(model, find_complex_dimensions(model, *window));
    if (formula.available_pairs() < pairs) {
      throw Error(ErrorKind::Window, "window T = " + fmt17(*window) + " holds only " +
                                         std::to_string(formula.available_pairs()) +
                                         " conjugate pairs, " + std::to_string(pairs) +
                                         " requested");
    }
    return formula;
  }
  double t = window_for_pairs(model.ratios, pairs);
  for (int attempt = 0; attempt < 8; ++attempt, t *= 1.25) {
    ResidueTubeFormula formula(model, find_complex_dimensions(model, t));
    if (formula.available_pairs() >= pairs) return formula;
  }
  throw Error(ErrorKind::Window, "could not collect " + std::to_string(pairs) + " conjugate pairs");
}

TubeEvaluation tube_volume_residues(const SprayModel& model, double eps, int pairs,
                                    std::optional<double> window) {
  require_tube_domain(model, eps);
  return build_residue_formula(model, pairs, window).evaluate(eps, pairs);
}

double default_inversion_abscissa(const SprayModel& model) {
  return 0.5 * (similarity_dimension(model.ratios).value + model.dimension());
}

double inverse_mellin_numeric(const SprayModel& model, double eps, double c, double half_length) {
  const double dim = similarity_dimension(model.ratios).value;
  const int n = model.dimension();
  if (!(c > dim && c < n)) {
    throw Error(ErrorKind::Strip, "inversion abscissa c = " + fmt17(c) + " must lie in (D, n) = (" +
                                      fmt17(dim) + ", " + std::to_string(n) + ")");
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  if (!(half_length > 0.0)) throw Error(ErrorKind::Domain, "inversion half-length must be positive");

  const DirichletPolynomial f(model.ratios);
  const double log_eps = std::log(eps);
  // The integrand at -t is the conjugate of that at t, so only the real
  // part over [0, T] is needed.
  auto integrand = [&](double t) {
    const cplx s{c, t};
    return std::real(mellin_numerator(model.generator, s) / f.value(s) * std::exp(-s * log_eps));
  };

  const double fastest = std::abs(log_eps - std::log(model.inradius())) +
                         2.0 * std::log(1.0 / model.ratios.min());
  const double step = std::min(0.5, 0.25 / fastest);
  std::size_t m = static_cast<std::size_t>(std::ceil(half_length / step));

  CompensatedSum interior, magnitude;
  for (std::size_t k = 1; k < m; ++k) {
    const double v = integrand(half_length * static_cast<double>(k) / static_cast<double>(m));
    interior += v;
    magnitude += std::abs(v);
  }
  const double ends = 0.5 * (integrand(0.0) + integrand(half_length));
  auto estimate = [&] { return (interior.value() + ends) * half_length / static_cast<double>(m); };
  double current = estimate();

  for (int level = 0; level < 24; ++level) {
    for (std::size_t k = 0; k < m; ++k) {
      const double v = integrand(half_length * (static_cast<double>(k) + 0.5) / static_cast<double>(m));
      interior += v;
      magnitude += std::abs(v);
    }
    m *= 2;
    const double next = estimate();
    const double scale = (magnitude.value() + std::abs(ends)) * half_length / static_cast<double>(m);
    if (std::abs(next - current) <= 1e-8 * scale) {
      return std::pow(eps, n) / pi * next;
    }
    current = next;
  }
  throw Error(ErrorKind::Convergence, "inverse Mellin quadrature did not converge");
}

std::vector<CompareRow> compare(const ResidueTubeFormula& formula,
                                const std::vector<double>& eps_grid, int pairs) {
  std::vector<CompareRow> rows(eps_grid.size());
  parallel_for(eps_grid.size(), [&](std::size_t k) {
    rows[k].epsilon = eps_grid[k];
    try {
      rows[k].evaluation = formula.evaluate(eps_grid[k], pairs);
    } catch (const Error& e) {
      rows[k].error = e.what();
    }
  });
  return rows;
}

std::vector<CompareRow> compare(const SprayModel& model, const std::vector<double>& eps_grid,
                                int pairs, std::optional<double> window) {
  if (eps_grid.empty()) return {};
  return compare(build_residue_formula(model, pairs, window), eps_grid, pairs);
}

}  // namespace tubeforge
