#pragma once

#include "tubeforge/spray.hpp"

namespace tubeforge {

struct SimilarityDimension {
  double value = 0.0;
  double residual = 0.0;  // |sum r_j^D - 1|
  int iterations = 0;
};

/// sum_j r_j^x. Strictly decreasing in x, equal to J at x = 0.
double real_dirichlet_sum(const RatioList& ratios, double x);

/// Unique real D with sum r_j^D = 1. Brackets by doubling, bisects, then
/// Newton-polishes until the residual drops below 1e-13.
SimilarityDimension similarity_dimension(const RatioList& ratios);

}  // namespace tubeforge
