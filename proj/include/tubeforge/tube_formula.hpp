#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "tubeforge/complex_dimensions.hpp"
#include "tubeforge/spray.hpp"

namespace tubeforge {

/// N(s) = sum_{i=0}^{n} kappa_i g^{s-i} / (s - i), kappa_n = -Vol(G): the
/// Mellin transform of V_G(eps) eps^{-n} on n-1 < Re s < n, continued
/// meromorphically. Throws Error(PoleProximity) within 1e-12 of a pole.
cplx mellin_numerator(const MonophaseGenerator& gen, cplx s);

/// Residue of eps^{n-s} N(s) / f(s) at the integer pole s = i:
/// eps^{n-i} kappa_i / (1 - sum r_j^i).
double integer_pole_residue(const SprayModel& model, int i, double eps);

enum class ResidueKind { IntegerPole, SimpleZero, ContourFallback };

struct ResidueTerm {
  cplx location;
  cplx value;
  ResidueKind kind = ResidueKind::SimpleZero;
};

/// (1 / 2 pi i) times the integral of eps^{n-s} N(s) / f(s) over the circle
/// |s - center| = radius, periodic trapezoid doubled until two successive
/// estimates agree to 1e-10 relative. Throws Error(Convergence) after 20
/// doublings.
cplx contour_residue(const SprayModel& model, cplx center, double radius, double eps);

/// Residue at a complex dimension. Simple zeros with |f'| >= 1e-8 use
/// eps^{n-omega} N(omega) / f'(omega); anything else falls back to
/// contour_residue with radius min(0.4 * separation, 0.1), where
/// separation is the distance to the nearest entry of `others` or pole.
ResidueTerm zero_residue(const SprayModel& model, const ComplexDimension& omega, double eps,
                         const std::vector<ComplexDimension>& others = {});

struct TubeEvaluation {
  double epsilon = 0.0;
  double direct = 0.0;
  std::vector<double> partial_sums;  // index k: integer poles + real zeros + k pairs
  std::vector<double> leakage;       // |Im| of the complex partial sum, same indexing
  double window = 0.0;
  int pairs_used = 0;

  double residues() const { return partial_sums.back(); }
  double abs_error() const { return std::abs(residues() - direct); }
  double rel_error() const { return abs_error() / std::abs(direct); }
  double abs_error_at(int pairs) const { return std::abs(partial_sums.at(pairs) - direct); }
};

/// Residue expansion of the tube volume over a fixed set of complex
/// dimensions. Per-zero coefficients are computed once, so evaluation at
/// many eps is cheap.
class ResidueTubeFormula {
 public:
  /// Zeros must be closed under conjugation; each zero with Im > 0 is
  /// paired with its conjugate partner. Throws Error(Window) if a partner
  /// is missing.
  ResidueTubeFormula(SprayModel model, ZeroSearch zeros);

  const SprayModel& model() const noexcept { return model_; }
  int available_pairs() const noexcept { return static_cast<int>(pairs_.size()); }
  double window() const noexcept { return window_; }

  /// Requires 0 < eps < g and pairs <= available_pairs(). Partial sums are
  /// accumulated pair by pair in order of increasing |Im|.
  TubeEvaluation evaluate(double eps, int pairs) const;

  /// Individual terms: integer poles, real zeros, then pairs (upper zero
  /// first). Mostly for inspection and tests.
  std::vector<ResidueTerm> terms(double eps, int pairs) const;

 private:
  struct Coefficient {
    ComplexDimension zero;
    cplx weight;       // N(omega) / f'(omega) for simple zeros
    bool fallback;     // use contour_residue instead
    double radius;     // fallback circle radius
  };
  cplx term(const Coefficient& c, double eps) const;

  SprayModel model_;
  double window_;
  std::vector<Coefficient> real_zeros_;
  std::vector<std::pair<Coefficient, Coefficient>> pairs_;
};

/// Window height that holds at least `pairs` conjugate pairs, from the
/// zero density (T / 2 pi) ln(1 / r_min) per half plane, or exactly from
/// the period in the lattice case.
double window_for_pairs(const RatioList& ratios, int pairs);

/// Residue-sum tube volume at eps < g using `pairs` conjugate pairs.
/// Without an explicit window one is chosen by window_for_pairs (and
/// widened until enough pairs are present). Throws Error(Domain) for
/// eps >= g and Error(Window) if the window holds fewer pairs.
TubeEvaluation tube_volume_residues(const SprayModel& model, double eps, int pairs,
                                    std::optional<double> window = std::nullopt);

/// Builds a formula with at least `pairs` pairs available.
ResidueTubeFormula build_residue_formula(const SprayModel& model, int pairs,
                                         std::optional<double> window = std::nullopt);

/// eps^n (1 / 2 pi) integral_{-T}^{T} f~(c + it) eps^{-(c+it)} dt, the
/// truncated inverse Mellin transform of V(eps) / eps^n along Re s = c.
/// Throws Error(Strip) unless D < c < n.
double inverse_mellin_numeric(const SprayModel& model, double eps, double c, double half_length);

/// Default abscissa (D + n) / 2.
double default_inversion_abscissa(const SprayModel& model);

struct CompareRow {
  double epsilon = 0.0;
  std::optional<TubeEvaluation> evaluation;
  std::string error;  // set when evaluation is empty
};

/// Direct oracle against the residue sum on every eps of the grid. Entries
/// outside the residue formula's domain record their error and the run
/// continues.
std::vector<CompareRow> compare(const SprayModel& model, const std::vector<double>& eps_grid,
                                int pairs, std::optional<double> window = std::nullopt);
std::vector<CompareRow> compare(const ResidueTubeFormula& formula,
                                const std::vector<double>& eps_grid, int pairs);

}  // namespace tubeforge
