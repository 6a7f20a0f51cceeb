#pragma once

#include <span>
#include <string>
#include <vector>

namespace tubeforge {

/// Scaling ratios r_1..r_J of a self-similar spray. Duplicates are kept as
/// multiplicities. Ratios are stored in descending order, so every
/// computation sees the same sequence regardless of input permutation.
class RatioList {
 public:
  /// Throws Error(Validation) if the list is empty or any ratio lies
  /// outside the open interval (0, 1).
  explicit RatioList(std::vector<double> ratios);

  std::span<const double> values() const noexcept { return ratios_; }
  std::size_t size() const noexcept { return ratios_.size(); }
  double operator[](std::size_t j) const { return ratios_[j]; }
  double max() const noexcept { return ratios_.front(); }
  double min() const noexcept { return ratios_.back(); }

  /// Sum of r_j^p.
  double power_sum(double p) const;

  /// Distinct ratio values with their multiplicities, descending.
  struct Distinct {
    double ratio;
    double log_ratio;
    int multiplicity;
  };
  const std::vector<Distinct>& distinct() const noexcept { return distinct_; }

 private:
  std::vector<double> ratios_;
  std::vector<Distinct> distinct_;
};

/// Generator whose inner tube volume is a single polynomial up to the
/// inradius g and constant Vol(G) beyond:
///   V_G(eps) = sum_{i=0}^{n-1} kappa_i eps^{n-i}   for eps < g
///   V_G(eps) = Vol(G)                             for eps >= g
class MonophaseGenerator {
 public:
  /// Throws Error(Validation) on n < 1, kappa.size() != n, non-finite
  /// values, g <= 0 or Vol(G) <= 0. Continuity at g and monotonicity are
  /// not enforced here; see validate_spray.
  MonophaseGenerator(int dimension, std::vector<double> kappa, double inradius, double volume);

  int dimension() const noexcept { return n_; }
  std::span<const double> kappa() const noexcept { return kappa_; }
  double inradius() const noexcept { return g_; }
  double volume() const noexcept { return volume_; }

  /// kappa_i for i = 0..n, with the convention kappa_n = -Vol(G).
  double coefficient(int i) const;

  /// The tube polynomial sum kappa_i eps^{n-i}, valid for eps < g.
  double polynomial(double eps) const noexcept;
  /// Its derivative in eps.
  double polynomial_derivative(double eps) const noexcept;

 private:
  int n_;
  std::vector<double> kappa_;
  double g_;
  double volume_;
};

struct SprayModel {
  RatioList ratios;
  MonophaseGenerator generator;

  int dimension() const noexcept { return generator.dimension(); }
  double inradius() const noexcept { return generator.inradius(); }
};

/// Inner eps-tube volume of the generator. Throws Error(Domain) for eps <= 0.
double generator_tube_volume(const MonophaseGenerator& gen, double eps);

/// Vol(G) / (1 - sum r_j^n): the tube volume of the whole spray at any
/// eps >= g. Throws Error(Divergence) when sum r_j^n >= 1.
double total_spray_volume(const SprayModel& model);

/// Raw, unvalidated spray description as read from a configuration file.
struct SprayConfig {
  int dimension = 0;
  std::vector<double> ratios;
  std::vector<double> kappa;
  double inradius = 0.0;
  double volume = 0.0;
};

struct ValidationOptions {
  bool check_monotonicity = true;
};

struct ValidationIssue {
  std::string code;     // stable identifier, e.g. "continuity"
  std::string message;  // human-readable description
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool passed() const noexcept { return issues.empty(); }
  bool has(const std::string& code) const;
};

ValidationReport validate_spray(const SprayConfig& config, ValidationOptions options = {});
ValidationReport validate_spray(const SprayModel& model, ValidationOptions options = {});

/// Builds a model from a configuration, throwing Error(Validation) with
/// the report text if validation fails.
SprayModel make_spray(const SprayConfig& config, ValidationOptions options = {});

SprayConfig to_config(const SprayModel& model);

// Reference models used by tests, selftest and documentation.
SprayModel cantor_spray();       // {1/3, 1/3}, interval of length 1/3
SprayModel unit_square_spray();  // {1/2, 1/3, 1/4}, unit square

}  // namespace tubeforge
