#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tubeforge/spray.hpp"

namespace tubeforge {

inline constexpr std::size_t kWordGuard = 50'000'000;

/// One element of the scaling sequence: a word over the ratio list and the
/// product of its letters.
struct ScalingWord {
  double factor = 1.0;                 // lambda, product of letters
  std::vector<std::uint32_t> letters;  // indices into RatioList::values()
  std::size_t depth() const noexcept { return letters.size(); }
};

/// All words (with multiplicity, including the empty word) with
/// factor > threshold, sorted by descending factor, then depth, then
/// letters. Throws Error(Domain) for threshold <= 0 and ResourceError
/// beyond kWordGuard words.
std::vector<ScalingWord> enumerate_words(const RatioList& ratios, double threshold);

/// Exact tube volume of the spray:
///   sum_{lambda > eps/g} lambda^n V_G(eps/lambda) + Vol(G) sum_{lambda <= eps/g} lambda^n
/// Words are grouped by letter multiset, the second sum is closed-form via
/// the boundary of the enumerated tree. Throws Error(Domain) for eps <= 0,
/// ResourceError when more than kWordGuard multisets would be visited.
double direct_tube_volume(const SprayModel& model, double eps);

/// V(eps) - sum_j r_j^n V(eps / r_j) - V_G(eps), with V = direct_tube_volume.
double functional_equation_residual(const SprayModel& model, double eps);

/// Least-squares slope of log V(eps) against log eps over
/// eps = g 2^{-m}, m = 1..depth. Approaches n - D. Requires depth >= 8.
double scaling_exponent_fit(const SprayModel& model, int depth);

/// Same fit after subtracting the integer-pole terms
/// eps^{n-i} kappa_i / (1 - sum r_j^i), i = 0..n-1. When n - D is close to
/// an integer exponent the raw fit is biased by those terms; this one is not.
double scaling_exponent_fit_corrected(const SprayModel& model, int depth);

/// Range of V(eps) / eps^{n-D} over eps = g 2^{-m}, m = 1..depth.
struct ScalingBound {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double oscillation() const noexcept { return max_ratio / min_ratio; }
};
ScalingBound scaling_bound(const SprayModel& model, int depth);

}  // namespace tubeforge
