#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "tubeforge/spray.hpp"

namespace tubeforge {

using cplx = std::complex<double>;

/// f(s) = 1 - sum_j r_j^s, the function whose zeros are the complex
/// dimensions, together with f'(s) = -sum_j r_j^s ln r_j.
class DirichletPolynomial {
 public:
  explicit DirichletPolynomial(const RatioList& ratios);

  cplx value(cplx s) const;
  cplx derivative(cplx s) const;
  /// Both at once, sharing the exponentials.
  void evaluate(cplx s, cplx& value, cplx& derivative) const;

 private:
  std::vector<RatioList::Distinct> terms_;
};

struct ComplexDimension {
  cplx omega;
  int multiplicity = 1;
  double residual = 0.0;  // |f(omega)|
};

struct LatticeStructure {
  bool is_lattice = false;
  double base = 0.0;           // r with r_j = r^{k_j}
  std::vector<int> exponents;  // k_j, aligned with RatioList::values()
  double period = 0.0;         // 2 pi / ln(1/r)
};

/// Lattice iff every ln r_j / ln r_1 is rational with denominator <= 64
/// and the reconstructed r^{k_j} matches r_j to 1e-9.
LatticeStructure detect_lattice(const RatioList& ratios);

/// Zeros of f with |Im| <= window from the roots of 1 - sum z^{k_j},
/// sorted by (Im, Re). Throws Error(Precondition) for nonlattice input.
std::vector<ComplexDimension> lattice_zeros(const LatticeStructure& structure,
                                            const RatioList& ratios, double window);

struct Rect {
  double re_lo, re_hi, im_lo, im_hi;
  double width() const noexcept { return re_hi - re_lo; }
  double height() const noexcept { return im_hi - im_lo; }
  cplx center() const noexcept { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
  bool contains(cplx z, double slack = 0.0) const noexcept {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack &&
           z.imag() >= im_lo - slack && z.imag() <= im_hi + slack;
  }
};

/// Zeros of f inside rect, with multiplicity, by the argument principle.
/// Throws Error(BoundaryProximity) if the winding estimate is further than
/// 0.25 from an integer or the contour cannot be resolved.
int count_zeros_rectangle(const RatioList& ratios, const Rect& rect);

/// Same, growing the rectangle outward by 1e-6 (1 + |coordinate|) per
/// attempt, up to 5 retries. `used` receives the rectangle that succeeded.
int count_zeros_perturbed(const RatioList& ratios, const Rect& rect, Rect* used = nullptr);

/// Newton iteration from seed to |f(omega)| < 1e-12. Throws
/// Error(Convergence) after 100 iterations.
ComplexDimension refine_zero(const RatioList& ratios, cplx seed);

/// Real abscissa left of which m r_min^sigma dominates 1 + the other
/// terms, so f has no zeros there.
double zero_free_left_bound(const RatioList& ratios);

struct ZeroSearch {
  std::vector<ComplexDimension> zeros;  // sorted by (Im, Re)
  Rect window{};                        // rectangle actually searched
  int window_count = 0;                 // winding count of that window
  bool lattice = false;
};

/// Complex dimensions with |Im| <= window. Lattice lists use the exact
/// polynomial structure; otherwise the window [sigma_low, D + 0.5] x
/// [-T, T] is tiled and searched by winding-number bisection.
ZeroSearch find_complex_dimensions(const RatioList& ratios, double window,
                                   std::optional<double> re_floor = std::nullopt);

/// As above, plus the hard check that no zero sits within 1e-6 of an
/// integer pole 0..n-1 of the Mellin numerator.
ZeroSearch find_complex_dimensions(const SprayModel& model, double window,
                                   std::optional<double> re_floor = std::nullopt);

}  // namespace tubeforge
