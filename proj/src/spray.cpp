#include "tubeforge/spray.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "format.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"

namespace tubeforge {

using detail::fmt17;

namespace {

constexpr int kMonotonicitySamples = 1024;
constexpr double kContinuityTolerance = 1e-12;

std::string join_messages(const ValidationReport& report) {
  std::ostringstream out;
  for (std::size_t k = 0; k < report.issues.size(); ++k) {
    if (k) out << "; ";
    out << report.issues[k].message;
  }
  return out.str();
}

// Structural checks shared by validate_spray and the type constructors.
void check_ratios(std::span<const double> ratios, ValidationReport& report) {
  if (ratios.empty()) {
    report.issues.push_back({"ratio_count", "ratio list is empty"});
    return;
  }
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    const double r = ratios[j];
    if (!std::isfinite(r) || r <= 0.0 || r >= 1.0) {
      report.issues.push_back({"ratio_bounds", "ratio r_" + std::to_string(j + 1) + " = " +
                                                   fmt17(r) + " is not in (0, 1)"});
    }
  }
}

void check_generator(int n, std::span<const double> kappa, double g, double volume,
                     ValidationReport& report) {
  if (n < 1) report.issues.push_back({"dimension", "dimension must be a positive integer"});
  if (n >= 1 && kappa.size() != static_cast<std::size_t>(n)) {
    report.issues.push_back({"kappa_length", "kappa has " + std::to_string(kappa.size()) +
                                                 " entries, expected n = " + std::to_string(n)});
  }
  for (double k : kappa) {
    if (!std::isfinite(k)) {
      report.issues.push_back({"kappa_finite", "kappa contains a non-finite value"});
      break;
    }
  }
  if (!std::isfinite(g) || g <= 0.0) {
    report.issues.push_back({"inradius", "inradius g = " + fmt17(g) + " must be positive"});
  }
  if (!std::isfinite(volume) || volume <= 0.0) {
    report.issues.push_back({"volume", "volume Vol(G) = " + fmt17(volume) + " must be positive"});
  }
}

void check_model(const SprayModel& model, ValidationOptions options, ValidationReport& report) {
  const auto& gen = model.generator;
  const int n = gen.dimension();
  const double g = gen.inradius();

  const double at_g = gen.polynomial(g);
  if (std::abs(at_g - gen.volume()) > kContinuityTolerance * gen.volume()) {
    report.issues.push_back({"continuity", "continuity at g violated: V_G(g-) = " + fmt17(at_g) +
                                               " != Vol(G) = " + fmt17(gen.volume())});
  }

  if (options.check_monotonicity) {
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      scale += std::abs((n - i) * gen.coefficient(i) * std::pow(g, n - i - 1));
    }
    const double tol = 1e-12 * scale;
    for (int k = 0; k <= kMonotonicitySamples + 1; ++k) {
      const double eps = g * static_cast<double>(k) / (kMonotonicitySamples + 1);
      const double slope = gen.polynomial_derivative(eps);
      if (slope < -tol) {
        report.issues.push_back({"monotonicity", "V_G decreases on (0, g]: derivative " +
                                                     fmt17(slope) + " at eps = " + fmt17(eps)});
        break;
      }
    }
  }

  const double power_sum = model.ratios.power_sum(n);
  if (power_sum >= 1.0) {
    report.issues.push_back({"total_volume", "sum r_j^n = " + fmt17(power_sum) +
                                                 ", total volume infinite"});
  }

  const double dim = similarity_dimension(model.ratios).value;
  if (!(dim > n - 1 && dim < n)) {
    report.issues.push_back({"dimension_range", "similarity dimension D = " + fmt17(dim) +
                                                    " is not in (n-1, n) = (" +
                                                    std::to_string(n - 1) + ", " +
                                                    std::to_string(n) + ")"});
  }
}

}  // namespace

RatioList::RatioList(std::vector<double> ratios) : ratios_(std::move(ratios)) {
  ValidationReport report;
  check_ratios(ratios_, report);
  if (!report.passed()) throw Error(ErrorKind::Validation, join_messages(report));

  std::sort(ratios_.begin(), ratios_.end(), std::greater<>());
  for (double r : ratios_) {
    if (!distinct_.empty() && distinct_.back().ratio == r) {
      ++distinct_.back().multiplicity;
    } else {
      distinct_.push_back({r, std::log(r), 1});
    }
  }
}

double RatioList::power_sum(double p) const {
  double sum = 0.0;
  for (const auto& d : distinct_) sum += d.multiplicity * std::pow(d.ratio, p);
  return sum;
}

MonophaseGenerator::MonophaseGenerator(int dimension, std::vector<double> kappa, double inradius,
                                       double volume)
    : n_(dimension), kappa_(std::move(kappa)), g_(inradius), volume_(volume) {
  ValidationReport report;
  check_generator(n_, kappa_, g_, volume_, report);
  if (!report.passed()) throw Error(ErrorKind::Validation, join_messages(report));
}

double MonophaseGenerator::coefficient(int i) const {
  if (i < 0 || i > n_) throw Error(ErrorKind::Domain, "coefficient index out of range");
  return i == n_ ? -volume_ : kappa_[static_cast<std::size_t>(i)];
}

double MonophaseGenerator::polynomial(double eps) const noexcept {
  // Horner in eps; the constant term (kappa_n) is absent.
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) acc = acc * eps + kappa_[static_cast<std::size_t>(i)];
  return acc * eps;
}

double MonophaseGenerator::polynomial_derivative(double eps) const noexcept {
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) acc = acc * eps + (n_ - i) * kappa_[static_cast<std::size_t>(i)];
  return acc;
}

double generator_tube_volume(const MonophaseGenerator& gen, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  if (eps >= gen.inradius()) return gen.volume();
  return gen.polynomial(eps);
}

double total_spray_volume(const SprayModel& model) {
  const double power_sum = model.ratios.power_sum(model.dimension());
  if (power_sum >= 1.0) {
    throw Error(ErrorKind::Divergence,
                "sum r_j^n = " + fmt17(power_sum) + " >= 1, total spray volume is infinite");
  }
  return model.generator.volume() / (1.0 - power_sum);
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& issue) { return issue.code == code; });
}

ValidationReport validate_spray(const SprayConfig& config, ValidationOptions options) {
  ValidationReport report;
  check_ratios(config.ratios, report);
  check_generator(config.dimension, config.kappa, config.inradius, config.volume, report);
  if (!report.passed()) return report;

  const SprayModel model{RatioList(config.ratios),
                         MonophaseGenerator(config.dimension, config.kappa, config.inradius,
                                            config.volume)};
  check_model(model, options, report);
  return report;
}

ValidationReport validate_spray(const SprayModel& model, ValidationOptions options) {
  ValidationReport report;
  check_model(model, options, report);
  return report;
}

SprayModel make_spray(const SprayConfig& config, ValidationOptions options) {
  const ValidationReport report = validate_spray(config, options);
  if (!report.passed()) throw Error(ErrorKind::Validation, join_messages(report));
  return SprayModel{RatioList(config.ratios),
                    MonophaseGenerator(config.dimension, config.kappa, config.inradius,
                                       config.volume)};
}

SprayConfig to_config(const SprayModel& model) {
  const auto& gen = model.generator;
  return SprayConfig{gen.dimension(),
                     {model.ratios.values().begin(), model.ratios.values().end()},
                     {gen.kappa().begin(), gen.kappa().end()},
                     gen.inradius(),
                     gen.volume()};
}

SprayModel cantor_spray() {
  return SprayModel{RatioList({1.0 / 3.0, 1.0 / 3.0}),
                    MonophaseGenerator(1, {2.0}, 1.0 / 6.0, 1.0 / 3.0)};
}

SprayModel unit_square_spray() {
  return SprayModel{RatioList({0.5, 1.0 / 3.0, 0.25}),
                    MonophaseGenerator(2, {-4.0, 4.0}, 0.5, 1.0)};
}

}  // namespace tubeforge
