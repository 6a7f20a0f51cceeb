#pragma once

#include <complex>

#include "tubeforge/spray.hpp"

// Independent reference computations. None of these share an evaluation
// path with the routines they are used to check.
namespace tubeforge::verification {

/// Integral of V_G(eps) eps^{s-n-1} over (0, inf) by adaptive Gauss-Kronrod,
/// split at the inradius; valid for n-1 < Re s < n.
std::complex<double> mellin_numerator_quadrature(const MonophaseGenerator& gen,
                                                 std::complex<double> s);

/// Tube volume by materializing every word with lambda > eps/g and using
/// Vol(G) (1/(1 - sum r^n) - sum lambda^n) for the rest.
double direct_tube_volume_by_words(const SprayModel& model, double eps);

/// Similarity dimension by plain bisection on [0, x_hi].
double similarity_dimension_by_bisection(const RatioList& ratios);

}  // namespace tubeforge::verification
