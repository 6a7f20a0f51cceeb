#include "tubeforge/direct.hpp"

#include <algorithm>
#include <cmath>

#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/summation.hpp"

namespace tubeforge {

namespace {

class WordCollector {
 public:
  WordCollector(const RatioList& ratios, double threshold, std::vector<ScalingWord>& out)
      : ratios_(ratios), threshold_(threshold), out_(out) {}

  void visit(const ScalingWord& word) {
    out_.push_back(word);
    for (std::uint32_t j = 0; j < ratios_.size(); ++j) {
      const double child = word.factor * ratios_[j];
      if (child <= threshold_) continue;
      ScalingWord next{child, word.letters};
      next.letters.push_back(j);
      visit(next);
    }
  }

 private:
  const RatioList& ratios_;
  double threshold_;
  std::vector<ScalingWord>& out_;
};

// Counts words with factor > threshold, stopping once the guard is passed.
void count_words(const RatioList& ratios, double factor, double threshold, std::size_t& count) {
  if (++count > kWordGuard) return;
  for (double r : ratios.values()) {
    if (factor * r <= threshold) break;  // ratios are descending
    count_words(ratios, factor * r, threshold, count);
    if (count > kWordGuard) return;
  }
}

// Depth-first walk over letter multisets with factor > threshold. A
// multiset with counts c_v over the distinct ratios stands for
// multinomial(depth; c) * prod m_v^{c_v} words, all with the same factor.
class MultisetWalk {
 public:
  MultisetWalk(const SprayModel& model, double eps)
      : model_(model),
        letters_(model.ratios.distinct()),
        eps_(eps),
        threshold_(eps / model.inradius()),
        counts_(letters_.size(), 0) {}

  void run() { visit(1.0, 1.0, 0, 0); }

  double interior() const { return interior_.value(); }
  double boundary() const { return boundary_.value(); }

 private:
  void visit(double factor, double weight, int depth, std::size_t first) {
    if (++classes_ > kWordGuard) {
      throw ResourceError("direct evaluation exceeds " + std::to_string(kWordGuard) +
                              " word classes; eps too small for this ratio list",
                          classes_);
    }
    const int n = model_.dimension();
    interior_ += weight * std::pow(factor, n) * model_.generator.polynomial(eps_ / factor);

    for (std::size_t v = 0; v < letters_.size(); ++v) {
      const double child = factor * letters_[v].ratio;
      if (child <= threshold_) {
        // Every extension of this class by letter v leaves the tree; its
        // whole subtree is in the constant regime.
        boundary_ += weight * letters_[v].multiplicity * std::pow(child, n);
      } else if (v >= first) {
        const double child_weight = weight * (depth + 1) / (counts_[v] + 1) *
                                    letters_[v].multiplicity;
        ++counts_[v];
        visit(child, child_weight, depth + 1, v);
        --counts_[v];
      }
    }
  }

  const SprayModel& model_;
  const std::vector<RatioList::Distinct>& letters_;
  double eps_;
  double threshold_;
  std::vector<int> counts_;
  std::size_t classes_ = 0;
  CompensatedSum interior_;
  CompensatedSum boundary_;
};

}  // namespace

std::vector<ScalingWord> enumerate_words(const RatioList& ratios, double threshold) {
  if (!(threshold > 0.0)) {
    throw Error(ErrorKind::Domain, "word threshold must be positive; the full word set is infinite");
  }
  std::vector<ScalingWord> words;
  if (1.0 <= threshold) return words;
  std::size_t count = 0;
  count_words(ratios, 1.0, threshold, count);
  if (count > kWordGuard) {
    throw ResourceError("word enumeration exceeds " + std::to_string(kWordGuard) +
                            " words; threshold too small for this ratio list",
                        count);
  }
  words.reserve(count);
  WordCollector(ratios, threshold, words).visit(ScalingWord{});

  std::sort(words.begin(), words.end(), [](const ScalingWord& a, const ScalingWord& b) {
    if (a.factor != b.factor) return a.factor > b.factor;
    if (a.depth() != b.depth()) return a.depth() < b.depth();
    return a.letters < b.letters;
  });
  return words;
}

double direct_tube_volume(const SprayModel& model, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "tube radius eps must be positive");
  const double total = total_spray_volume(model);
  if (eps >= model.inradius()) return total;

  MultisetWalk walk(model, eps);
  walk.run();
  CompensatedSum v;
  v += walk.interior();
  v += total * walk.boundary();
  return v.value();
}

double functional_equation_residual(const SprayModel& model, double eps) {
  const int n = model.dimension();
  CompensatedSum residual;
  residual += direct_tube_volume(model, eps);
  for (double r : model.ratios.values()) {
    residual += -std::pow(r, n) * direct_tube_volume(model, eps / r);
  }
  residual += -generator_tube_volume(model.generator, eps);
  return residual.value();
}

namespace {

template <class Volume>
double log_log_slope(const SprayModel& model, int depth, Volume volume) {
  if (depth < 8) throw Error(ErrorKind::Domain, "scaling fit needs depth >= 8");
  // Ordinary least squares on (log eps, log V).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int m = 1; m <= depth; ++m) {
    const double eps = std::ldexp(model.inradius(), -m);
    const double x = std::log(eps);
    const double y = std::log(volume(eps));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = depth;
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace

double scaling_exponent_fit(const SprayModel& model, int depth) {
  return log_log_slope(model, depth, [&](double eps) { return direct_tube_volume(model, eps); });
}

double scaling_exponent_fit_corrected(const SprayModel& model, int depth) {
  const int n = model.dimension();
  return log_log_slope(model, depth, [&](double eps) {
    CompensatedSum v;
    v += direct_tube_volume(model, eps);
    for (int i = 0; i < n; ++i) {
      v += -std::pow(eps, n - i) * model.generator.coefficient(i) / (1.0 - model.ratios.power_sum(i));
    }
    return v.value();
  });
}

ScalingBound scaling_bound(const SprayModel& model, int depth) {
  if (depth < 1) throw Error(ErrorKind::Domain, "scaling bound needs depth >= 1");
  const double exponent = model.dimension() - similarity_dimension(model.ratios).value;
  ScalingBound bound{INFINITY, 0.0};
  for (int m = 1; m <= depth; ++m) {
    const double eps = std::ldexp(model.inradius(), -m);
    const double ratio = direct_tube_volume(model, eps) / std::pow(eps, exponent);
    bound.min_ratio = std::min(bound.min_ratio, ratio);
    bound.max_ratio = std::max(bound.max_ratio, ratio);
  }
  return bound;
}

}  // namespace tubeforge
