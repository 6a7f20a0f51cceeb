#include "tubeforge/complex_dimensions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "format.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/parallel.hpp"
#include "tubeforge/summation.hpp"

namespace tubeforge {

using detail::fmt17;
using std::numbers::pi;

namespace {

constexpr int kMaxDenominator = 64;
constexpr double kLatticeTolerance = 1e-9;
constexpr int kMaxLatticeDegree = 2048;
constexpr double kNewtonTarget = 1e-12;
constexpr int kNewtonIterations = 100;
constexpr double kDedupDistance = 1e-8;
constexpr double kMinRectSize = 1e-8;
constexpr int kPerturbationRetries = 5;
constexpr double kPanelTolerance = 0.05;
constexpr std::size_t kMaxPanels = 20'000'000;

// r^s = exp(s ln r), with the phase t ln r carried to double-double
// accuracy so that large |Im s| does not lose digits in the rotation.
cplx exp_log(double log_ratio, cplx s) {
  const double mag = std::exp(s.real() * log_ratio);
  const double phase = s.imag() * log_ratio;
  const double tail = std::fma(s.imag(), log_ratio, -phase);
  const double c = std::cos(phase);
  const double sn = std::sin(phase);
  return {mag * (c - tail * sn), mag * (sn + tail * c)};
}

// Continued-fraction convergent p/q of x > 0 with q <= kMaxDenominator
// matching x within tol, if any.
bool rational_approximation(double x, double tol, long& p_out, long& q_out) {
  long p_prev = 1, p = static_cast<long>(std::floor(x));
  long q_prev = 0, q = 1;
  double rest = x - std::floor(x);
  while (true) {
    if (std::abs(x - static_cast<double>(p) / q) <= tol) {
      p_out = p;
      q_out = q;
      return true;
    }
    if (rest < 1e-15) return false;
    const double inv = 1.0 / rest;
    const long a = static_cast<long>(std::floor(inv));
    rest = inv - std::floor(inv);
    const long p_next = a * p + p_prev;
    const long q_next = a * q + q_prev;
    if (q_next > kMaxDenominator) return false;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
}

std::vector<ComplexDimension> dedupe_sorted(std::vector<ComplexDimension> zeros) {
  std::sort(zeros.begin(), zeros.end(), [](const ComplexDimension& a, const ComplexDimension& b) {
    if (a.omega.imag() != b.omega.imag()) return a.omega.imag() < b.omega.imag();
    return a.omega.real() < b.omega.real();
  });
  std::vector<ComplexDimension> out;
  for (const auto& z : zeros) {
    // Sorted by Im, so a near-duplicate can only sit among the last few
    // entries with Im within kDedupDistance.
    bool merged = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (z.omega.imag() - it->omega.imag() > kDedupDistance) break;
      if (std::abs(z.omega - it->omega) < kDedupDistance) {
        it->multiplicity = std::max(it->multiplicity, z.multiplicity);
        if (z.residual < it->residual) {
          it->omega = z.omega;
          it->residual = z.residual;
        }
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(z);
  }
  return out;
}

Rect expand(const Rect& r, int attempt) {
  const double k = 1e-6 * attempt;
  return {r.re_lo - k * (1 + std::abs(r.re_lo)), r.re_hi + k * (1 + std::abs(r.re_hi)),
          r.im_lo - k * (1 + std::abs(r.im_lo)), r.im_hi + k * (1 + std::abs(r.im_hi))};
}

// Winding of f along one edge. Panels are split until the trapezoid and
// its midpoint refinement agree with each other and with the principal
// log increment log(f(b)/f(a)); the accepted increments then add up to the
// exact change of log f. The Richardson-extrapolated trapezoid sum is
// returned alongside as an independent estimate.
class EdgeIntegrator {
 public:
  EdgeIntegrator(const DirichletPolynomial& f, double max_log_ratio)
      : f_(f), initial_step_(std::min(0.25, 0.5 / max_log_ratio)) {}

  void integrate(cplx a, cplx b) {
    struct Node {
      cplx s;
      cplx f;
      cplx df;
    };
    auto node = [&](cplx s) {
      Node n{s, {}, {}};
      f_.evaluate(s, n.f, n.df);
      return n;
    };

    const double length = std::abs(b - a);
    const int pieces = std::max(4, static_cast<int>(std::ceil(length / initial_step_)));
    Node left = node(a);
    for (int k = 1; k <= pieces; ++k) {
      const cplx end = k == pieces ? b : a + (b - a) * (static_cast<double>(k) / pieces);
      Node right = node(end);

      // Depth-first, left half first, so the summation order is fixed.
      std::vector<std::pair<Node, Node>> stack{{left, right}};
      while (!stack.empty()) {
        auto [pa, pb] = stack.back();
        stack.pop_back();
        if (++panels_ > kMaxPanels) {
          throw Error(ErrorKind::BoundaryProximity, "winding contour needs too many panels");
        }
        const cplx h = pb.s - pa.s;
        const Node pm = node(0.5 * (pa.s + pb.s));
        const cplx ga = pa.df / pa.f, gm = pm.df / pm.f, gb = pb.df / pb.f;
        const cplx coarse = 0.5 * h * (ga + gb);
        const cplx fine = 0.25 * h * (ga + 2.0 * gm + gb);
        const cplx increment = std::log(pb.f / pa.f);
        const bool ok = std::isfinite(fine.real()) && std::isfinite(fine.imag()) &&
                        std::isfinite(increment.real()) && std::isfinite(increment.imag()) &&
                        std::abs(fine - coarse) <= kPanelTolerance &&
                        std::abs(fine - increment) <= kPanelTolerance &&
                        std::abs(increment.imag()) <= 0.5 * pi;
        if (ok) {
          phase_ += increment.imag();
          trapezoid_ += fine + (fine - coarse) / 3.0;
          continue;
        }
        if (std::abs(h) < 1e-12 * (1.0 + std::abs(pa.s))) {
          throw Error(ErrorKind::BoundaryProximity,
                      "zero of 1 - sum r^s on or next to the contour near " +
                          fmt17(pa.s.real()) + " + " + fmt17(pa.s.imag()) + "i");
        }
        stack.push_back({pm, pb});
        stack.push_back({pa, pm});
      }
      left = right;
    }
  }

  double phase() const { return phase_.value(); }
  cplx trapezoid() const { return trapezoid_.value(); }

 private:
  const DirichletPolynomial& f_;
  double initial_step_;
  std::size_t panels_ = 0;
  CompensatedSum phase_;
  CompensatedComplexSum trapezoid_;
};

double max_abs_log(const RatioList& ratios) { return std::abs(std::log(ratios.min())); }

class TileSearch {
 public:
  explicit TileSearch(const RatioList& ratios) : ratios_(ratios), f_(ratios) {}

  void search(const Rect& rect, int count, int depth, std::vector<ComplexDimension>& out) const {
    if (count <= 0) return;
    if (depth > 200) throw Error(ErrorKind::Convergence, "zero subdivision too deep");

    if (count == 1) {
      try {
        ComplexDimension z = refine_zero(ratios_, rect.center());
        const double slack = 1e-9 * (1.0 + std::abs(z.omega));
        if (rect.contains(z.omega, slack)) {
          out.push_back(z);
          return;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Convergence) throw;
      }
    }

    if (std::max(rect.width(), rect.height()) < kMinRectSize) {
      // Cluster that does not separate: report it once with its count.
      const cplx c = rect.center();
      out.push_back({c, count, std::abs(f_.value(c))});
      return;
    }

    // Split the longer side slightly off-centre so symmetric windows do
    // not put a cut on the real axis.
    constexpr double kSplit = 0.5 + 1.0 / 64.0;
    Rect first = rect, second = rect;
    if (rect.width() >= rect.height()) {
      const double cut = rect.re_lo + kSplit * rect.width();
      first.re_hi = cut;
      second.re_lo = cut;
    } else {
      const double cut = rect.im_lo + kSplit * rect.height();
      first.im_hi = cut;
      second.im_lo = cut;
    }
    for (const Rect& half : {first, second}) {
      Rect used;
      const int c = count_zeros_perturbed(ratios_, half, &used);
      search(used, c, depth + 1, out);
    }
  }

 private:
  const RatioList& ratios_;
  DirichletPolynomial f_;
};

}  // namespace

DirichletPolynomial::DirichletPolynomial(const RatioList& ratios) : terms_(ratios.distinct()) {}

void DirichletPolynomial::evaluate(cplx s, cplx& value, cplx& derivative) const {
  CompensatedComplexSum v, d;
  v += 1.0;
  for (const auto& t : terms_) {
    const cplx z = static_cast<double>(t.multiplicity) * exp_log(t.log_ratio, s);
    v += -z;
    d += -t.log_ratio * z;
  }
  value = v.value();
  derivative = d.value();
}

cplx DirichletPolynomial::value(cplx s) const {
  cplx v, d;
  evaluate(s, v, d);
  return v;
}

cplx DirichletPolynomial::derivative(cplx s) const {
  cplx v, d;
  evaluate(s, v, d);
  return d;
}

LatticeStructure detect_lattice(const RatioList& ratios) {
  LatticeStructure out;
  const auto values = ratios.values();
  const double log_ref = std::log(values[0]);

  std::vector<long> num(values.size()), den(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double x = std::log(values[j]) / log_ref;
    // |x - p/q| |ln r_1| is the log-error of r_1^{p/q} against r_j.
    if (!rational_approximation(x, kLatticeTolerance / std::abs(log_ref), num[j], den[j])) {
      return out;
    }
  }

  long common = 1;
  for (long q : den) {
    common = std::lcm(common, q);
    if (common > kMaxLatticeDegree) return out;
  }
  std::vector<long> scaled(values.size());
  long divisor = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    scaled[j] = num[j] * (common / den[j]);
    divisor = std::gcd(divisor, scaled[j]);
  }

  std::vector<int> exponents(values.size());
  double kk = 0.0, kl = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    exponents[j] = static_cast<int>(scaled[j] / divisor);
    if (exponents[j] > kMaxLatticeDegree) return out;
    kk += static_cast<double>(exponents[j]) * exponents[j];
    kl += exponents[j] * std::log(values[j]);
  }
  // Least-squares base over all ratios, so it does not favour r_1.
  const double base = std::exp(kl / kk);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (std::abs(std::pow(base, exponents[j]) - values[j]) >= kLatticeTolerance) return out;
  }

  out.is_lattice = true;
  out.base = base;
  out.exponents = std::move(exponents);
  out.period = 2.0 * pi / std::log(1.0 / base);
  return out;
}

std::vector<ComplexDimension> lattice_zeros(const LatticeStructure& structure,
                                            const RatioList& ratios, double window) {
  if (!structure.is_lattice) {
    throw Error(ErrorKind::Precondition, "lattice_zeros called on a nonlattice ratio list");
  }
  if (!(window > 0.0)) throw Error(ErrorKind::Domain, "imaginary window must be positive");

  // 1 - sum z^{k_j}, coefficients in increasing degree.
  const int degree = *std::max_element(structure.exponents.begin(), structure.exponents.end());
  std::vector<double> poly(static_cast<std::size_t>(degree) + 1, 0.0);
  poly[0] = 1.0;
  for (int k : structure.exponents) poly[static_cast<std::size_t>(k)] -= 1.0;

  std::vector<cplx> roots;
  if (degree == 1) {
    roots.push_back(-poly[0] / poly[1]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -poly[i] / poly[degree];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::Convergence, "companion eigenvalue solver failed");
    }
    for (int i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()[i]);
  }

  auto horner = [&](cplx z, cplx& p, cplx& dp) {
    p = 0.0;
    dp = 0.0;
    for (int k = degree; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + poly[static_cast<std::size_t>(k)];
    }
  };
  for (cplx& z : roots) {
    for (int it = 0; it < 8; ++it) {
      cplx p, dp;
      horner(z, p, dp);
      if (dp == 0.0) break;
      const cplx next = z - p / dp;
      cplx pn, dpn;
      horner(next, pn, dpn);
      if (!(std::abs(pn) < std::abs(p))) break;
      z = next;
    }
    if (std::abs(z.imag()) <= 1e-12 * std::abs(z)) z.imag(0.0);
  }

  // Cluster repeated roots; keep the closed upper half plane and mirror it
  // so conjugate symmetry is exact.
  struct Root {
    cplx z;
    int multiplicity;
  };
  std::vector<Root> clusters;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t a = 0; a < roots.size(); ++a) {
    if (used[a]) continue;
    Root c{roots[a], 1};
    cplx sum = roots[a];
    used[a] = true;
    for (std::size_t b = a + 1; b < roots.size(); ++b) {
      if (!used[b] && std::abs(roots[b] - roots[a]) < 1e-5 * (1.0 + std::abs(roots[a]))) {
        used[b] = true;
        sum += roots[b];
        ++c.multiplicity;
      }
    }
    c.z = sum / static_cast<double>(c.multiplicity);
    if (c.multiplicity > 1 && std::abs(c.z.imag()) <= 1e-9 * std::abs(c.z)) c.z.imag(0.0);
    if (c.z.imag() >= 0.0) clusters.push_back(c);
  }
  const std::size_t upper_count = clusters.size();
  for (std::size_t k = 0; k < upper_count; ++k) {
    if (clusters[k].z.imag() > 0.0) clusters.push_back({std::conj(clusters[k].z), clusters[k].multiplicity});
  }

  // r^s = z  <=>  s = ln|z| / ln r + i p (k - arg z / 2 pi).
  const DirichletPolynomial f(ratios);
  const double log_base = std::log(structure.base);
  const double p = structure.period;
  std::vector<ComplexDimension> zeros;
  for (const Root& root : clusters) {
    const double re = std::log(std::abs(root.z)) / log_base;
    const double shift = -std::arg(root.z) / (2.0 * pi);
    const long k_lo = static_cast<long>(std::ceil(-window / p - shift));
    const long k_hi = static_cast<long>(std::floor(window / p - shift));
    for (long k = k_lo; k <= k_hi; ++k) {
      const cplx omega{re, p * (static_cast<double>(k) + shift)};
      if (std::abs(omega.imag()) > window) continue;
      zeros.push_back({omega, root.multiplicity, std::abs(f.value(omega))});
    }
  }
  return dedupe_sorted(std::move(zeros));
}

int count_zeros_rectangle(const RatioList& ratios, const Rect& rect) {
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) {
    throw Error(ErrorKind::Domain, "rectangle must have positive width and height");
  }
  const DirichletPolynomial f(ratios);
  EdgeIntegrator edges(f, max_abs_log(ratios));
  const cplx bl{rect.re_lo, rect.im_lo}, br{rect.re_hi, rect.im_lo};
  const cplx tr{rect.re_hi, rect.im_hi}, tl{rect.re_lo, rect.im_hi};
  edges.integrate(bl, br);
  edges.integrate(br, tr);
  edges.integrate(tr, tl);
  edges.integrate(tl, bl);

  // (1 / 2 pi i) * integral of f'/f by the trapezoid sums, and the exact
  // phase count from the certified panels; they must agree.
  const cplx winding = edges.trapezoid() / cplx(0.0, 2.0 * pi);
  const double nearest = std::round(winding.real());
  const double phase_count = std::round(edges.phase() / (2.0 * pi));
  if (std::abs(winding.real() - nearest) > 0.25 || std::abs(winding.imag()) > 0.25 ||
      nearest != phase_count) {
    throw Error(ErrorKind::BoundaryProximity,
                "winding integral " + fmt17(winding.real()) + " is not close to an integer");
  }
  return static_cast<int>(nearest);
}

int count_zeros_perturbed(const RatioList& ratios, const Rect& rect, Rect* used) {
  for (int attempt = 0;; ++attempt) {
    const Rect r = expand(rect, attempt);
    try {
      const int count = count_zeros_rectangle(ratios, r);
      if (used) *used = r;
      return count;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoundaryProximity || attempt == kPerturbationRetries) throw;
    }
  }
}

ComplexDimension refine_zero(const RatioList& ratios, cplx seed) {
  const DirichletPolynomial f(ratios);
  cplx s = seed;
  cplx v, d;
  f.evaluate(s, v, d);
  for (int it = 0; it < kNewtonIterations; ++it) {
    if (std::abs(v) < kNewtonTarget) {
      // A few polishing steps, kept only while they help.
      for (int polish = 0; polish < 3; ++polish) {
        if (d == 0.0) break;
        const cplx next = s - v / d;
        cplx nv, nd;
        f.evaluate(next, nv, nd);
        if (!(std::abs(nv) < std::abs(v))) break;
        s = next;
        v = nv;
        d = nd;
      }
      return {s, 1, std::abs(v)};
    }
    if (d == 0.0) break;
    s -= v / d;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) break;
    f.evaluate(s, v, d);
  }
  throw Error(ErrorKind::Convergence, "Newton iteration from " + fmt17(seed.real()) + " + " +
                                          fmt17(seed.imag()) + "i did not converge");
}

double zero_free_left_bound(const RatioList& ratios) {
  const auto& terms = ratios.distinct();
  const auto& smallest = terms.back();
  // Positive where the smallest ratio dominates all other terms plus 1.
  auto margin = [&](double sigma) {
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
      rest += terms[k].multiplicity * std::exp(sigma * terms[k].log_ratio);
    }
    return smallest.multiplicity * std::exp(sigma * smallest.log_ratio) - rest;
  };

  double holds = 0.0, fails = 0.0;
  if (margin(0.0) > 0.0) {
    fails = 1.0;
    while (margin(fails) > 0.0) fails += 1.0;
    holds = fails - 1.0;
  } else {
    holds = -1.0;
    while (!(margin(holds) > 0.0)) {
      holds -= 1.0;
      if (holds < -1e6) throw Error(ErrorKind::Convergence, "no zero-free half plane found");
    }
    fails = holds + 1.0;
  }
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (holds + fails);
    (margin(mid) > 0.0 ? holds : fails) = mid;
  }
  return holds;
}

ZeroSearch find_complex_dimensions(const RatioList& ratios, double window,
                                   std::optional<double> re_floor) {
  if (!(window > 0.0)) throw Error(ErrorKind::Domain, "imaginary window must be positive");
  const double dim = similarity_dimension(ratios).value;
  const double left = re_floor ? *re_floor : zero_free_left_bound(ratios) - 0.25;
  const Rect requested{left, dim + 0.5, -window, window};

  ZeroSearch result;
  const LatticeStructure lattice = detect_lattice(ratios);
  if (lattice.is_lattice) {
    result.lattice = true;
    for (auto& z : lattice_zeros(lattice, ratios, window)) {
      if (!re_floor || z.omega.real() >= *re_floor) result.zeros.push_back(z);
    }
    result.window_count = count_zeros_perturbed(ratios, requested, &result.window);
    return result;
  }

  result.window_count = count_zeros_perturbed(ratios, requested, &result.window);
  const Rect& w = result.window;

  // Horizontal strips, an odd number so one is centred on the real axis,
  // each expected to hold about half a zero.
  const double target_height = pi / max_abs_log(ratios);
  const long half = std::lround(0.5 * w.height() / target_height);
  const long strips = 2 * half + 1;
  const double strip_height = w.height() / static_cast<double>(strips);

  const TileSearch tiles(ratios);
  std::vector<std::vector<ComplexDimension>> found(static_cast<std::size_t>(strips));
  parallel_for(static_cast<std::size_t>(strips), [&](std::size_t k) {
    Rect strip = w;
    strip.im_lo = w.im_lo + strip_height * static_cast<double>(k);
    strip.im_hi = k + 1 == static_cast<std::size_t>(strips) ? w.im_hi : strip.im_lo + strip_height;
    Rect used;
    const int count = count_zeros_perturbed(ratios, strip, &used);
    tiles.search(used, count, 0, found[k]);
  });

  std::vector<ComplexDimension> all;
  for (auto& part : found) {
    for (auto& z : part) {
      if (!w.contains(z.omega)) continue;  // picked up by an outward perturbation
      all.push_back(z);
    }
  }
  result.zeros = dedupe_sorted(std::move(all));

  const DirichletPolynomial f(ratios);
  for (auto& z : result.zeros) {
    if (std::abs(z.omega.imag()) < 1e-12 * (1.0 + std::abs(z.omega.real()))) {
      z.omega.imag(0.0);
      z.residual = std::abs(f.value(z.omega));
    }
  }

  int total = 0;
  for (const auto& z : result.zeros) total += z.multiplicity;
  if (total != result.window_count) {
    throw Error(ErrorKind::Convergence, "zero search found multiplicity " + std::to_string(total) +
                                            " but the window winding count is " +
                                            std::to_string(result.window_count));
  }
  return result;
}

ZeroSearch find_complex_dimensions(const SprayModel& model, double window,
                                   std::optional<double> re_floor) {
  ZeroSearch result = find_complex_dimensions(model.ratios, window, re_floor);
  for (const auto& z : result.zeros) {
    for (int i = 0; i < model.dimension(); ++i) {
      if (std::abs(z.omega - cplx(i, 0.0)) < 1e-6) {
        throw Error(ErrorKind::Precondition,
                    "complex dimension " + fmt17(z.omega.real()) + " + " + fmt17(z.omega.imag()) +
                        "i collides with the integer pole " + std::to_string(i));
      }
    }
  }
  return result;
}

}  // namespace tubeforge
