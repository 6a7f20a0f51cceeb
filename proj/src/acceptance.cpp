#include "tubeforge/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "tubeforge/complex_dimensions.hpp"
#include "tubeforge/direct.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/tube_formula.hpp"
#include "tubeforge/verification.hpp"

namespace tubeforge::acceptance {

using std::numbers::pi;

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Minimum wall time over a few repetitions, to keep the timing checks
// insensitive to one-off scheduler noise.
double best_time(const std::function<void()>& work, int repetitions = 5) {
  double best = INFINITY;
  for (int k = 0; k < repetitions; ++k) {
    const auto start = std::chrono::steady_clock::now();
    work();
    best = std::min(best,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

CriterionResult moran_closed_forms() {
  CriterionResult r{1, "Moran closed forms", false, {}, 0.0};
  const RatioList cantor({1.0 / 3.0, 1.0 / 3.0});
  const RatioList golden({0.5, 0.25});
  SimilarityDimension a, b;
  const double ta = best_time([&] { a = similarity_dimension(cantor); });
  const double tb = best_time([&] { b = similarity_dimension(golden); });
  const double ea = std::abs(a.value - std::log(2.0) / std::log(3.0));
  const double eb = std::abs(b.value - std::log2(0.5 * (1.0 + std::sqrt(5.0))));
  r.seconds = ta + tb;
  r.passed = ea < 1e-10 && eb < 1e-10 && ta < 1e-3 && tb < 1e-3;
  r.detail = "|D-ln2/ln3| = " + sci(ea) + ", |D-log2(phi)| = " + sci(eb) +
             (ta < 1e-3 && tb < 1e-3 ? ", runtime < 1 ms" : ", runtime >= 1 ms");
  return r;
}

CriterionResult lattice_zeros_exact() {
  CriterionResult r{2, "Lattice zeros exact", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const RatioList ratios({1.0 / 3.0, 1.0 / 3.0});
  const ZeroSearch search = find_complex_dimensions(ratios, 30.0);
  const double dim = std::log(2.0) / std::log(3.0);
  const double period = 2.0 * pi / std::log(3.0);
  double worst = 0.0;
  bool matched = search.zeros.size() == 11;
  for (int k = -5; k <= 5 && matched; ++k) {
    const auto& z = search.zeros[static_cast<std::size_t>(k + 5)];
    worst = std::max(worst, std::abs(z.omega - cplx(dim, k * period)));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = matched && worst < 1e-9;
  r.detail = "count = " + std::to_string(search.zeros.size()) + ", max deviation = " + sci(worst);
  return r;
}

CriterionResult winding_completeness() {
  CriterionResult r{3, "Winding completeness", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const RatioList ratios({0.5, 1.0 / 3.0});
  const ZeroSearch search = find_complex_dimensions(ratios, 20.0);
  const int winding = count_zeros_rectangle(ratios, search.window);
  const DirichletPolynomial f(ratios);
  int total = 0;
  double worst = 0.0;
  for (const auto& z : search.zeros) {
    total += z.multiplicity;
    worst = std::max(worst, std::abs(f.value(z.omega)));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = total == winding && worst < 1e-10 && r.seconds < 10.0;
  r.detail = "multiplicity sum = " + std::to_string(total) + ", winding count = " +
             std::to_string(winding) + ", max |f| = " + sci(worst);
  return r;
}

CriterionResult functional_equation() {
  CriterionResult r{4, "Functional equation", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (const SprayModel& model : {cantor_spray(), unit_square_spray()}) {
    std::uniform_real_distribution<double> eps_dist(0.0, 10.0 * model.inradius());
    for (int k = 0; k < 100; ++k) {
      double eps = 0.0;
      while (eps == 0.0) eps = eps_dist(rng);
      const double v = direct_tube_volume(model, eps);
      worst = std::max(worst, std::abs(functional_equation_residual(model, eps)) / v);
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 1e-12;
  r.detail = "max |residual|/V = " + sci(worst) + " over 200 samples";
  return r;
}

CriterionResult constant_regime() {
  CriterionResult r{5, "Constant regime", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const SprayModel cantor = cantor_spray();
  const SprayModel square = unit_square_spray();
  double worst = 0.0;
  for (const SprayModel* model : {&cantor, &square}) {
    const double total = total_spray_volume(*model);
    for (double factor : {1.0, 1.5, 2.0, 10.0, 1e6}) {
      const double v = direct_tube_volume(*model, factor * model->inradius());
      worst = std::max(worst, std::abs(v - total) / total);
    }
  }
  const double cantor_error = std::abs(total_spray_volume(cantor) - 1.0);
  const double square_error = std::abs(total_spray_volume(square) - 144.0 / 83.0) / (144.0 / 83.0);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 1e-12 && cantor_error < 1e-12 && square_error < 1e-12;
  r.detail = "max rel deviation = " + sci(worst) + ", Cantor total - 1 = " + sci(cantor_error) +
             ", square total vs 144/83 = " + sci(square_error);
  return r;
}

CriterionResult mellin_identity() {
  CriterionResult r{6, "Mellin numerator identity", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const SprayModel& model : {cantor_spray(), unit_square_spray()}) {
    const int n = model.dimension();
    std::uniform_real_distribution<double> re(n - 1 + 0.05, n - 0.05);
    std::uniform_real_distribution<double> im(-5.0, 5.0);
    for (int k = 0; k < 20; ++k) {
      const cplx s{re(rng), im(rng)};
      const cplx closed = mellin_numerator(model.generator, s);
      const cplx quad = verification::mellin_numerator_quadrature(model.generator, s);
      worst = std::max(worst, std::abs(closed - quad));
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 1e-7 && r.seconds < 5.0;
  r.detail = "max |N(s) - quadrature| = " + sci(worst) + " over 40 strip points";
  return r;
}

CriterionResult residue_agreement() {
  CriterionResult r{7, "Residue formula agreement (Cantor)", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const SprayModel model = cantor_spray();
  const double g = model.inradius();
  const ResidueTubeFormula formula = build_residue_formula(model, 500);
  bool ok = true;
  double worst = 0.0, worst_leak = 0.0;
  std::ostringstream notes;
  for (double eps : {g / 2, g / 4, g / 8, 0.1, 1.0 / 18.0}) {
    const TubeEvaluation ev = formula.evaluate(eps, 500);
    const double err = ev.abs_error();
    const double err5 = ev.abs_error_at(5);
    double leak = 0.0;
    for (std::size_t k = 0; k < ev.leakage.size(); ++k) {
      leak = std::max(leak, ev.leakage[k]);
      ok = ok && ev.leakage[k] < 1e-10;
    }
    worst = std::max(worst, err);
    worst_leak = std::max(worst_leak, leak);
    ok = ok && err < 1e-3 && err < err5;
    notes << " eps=" << fixed(eps) << ":" << sci(err) << "(K=5:" << sci(err5) << ")";
  }
  const double d01 = std::abs(direct_tube_volume(model, 0.1) - 13.0 / 15.0);
  const double d118 = std::abs(direct_tube_volume(model, 1.0 / 18.0) - 7.0 / 9.0);
  ok = ok && d01 < 1e-12 && d118 < 1e-12;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = ok && r.seconds < 30.0;
  r.detail = "max |err| = " + sci(worst) + ", max leakage = " + sci(worst_leak) +
             ", direct(0.1)-13/15 = " + sci(d01) + ", direct(1/18)-7/9 = " + sci(d118) + ";" +
             notes.str();
  return r;
}

CriterionResult nonlattice_agreement() {
  CriterionResult r{8, "Nonlattice residue agreement (square)", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const SprayModel model = unit_square_spray();
  const double g = model.inradius();
  constexpr int kPairs = 200;
  const ResidueTubeFormula formula = build_residue_formula(model, kPairs);
  double worst = 0.0;
  std::ostringstream notes;
  for (double eps : {g / 2, g / 8}) {
    const TubeEvaluation ev = formula.evaluate(eps, kPairs);
    worst = std::max(worst, ev.rel_error());
    notes << " eps=" << fixed(eps) << ":" << sci(ev.rel_error());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 1e-2;
  r.detail = "K = " + std::to_string(kPairs) + ", max rel err = " + sci(worst) + ";" + notes.str();
  return r;
}

CriterionResult scaling_slope() {
  CriterionResult r{9, "Small-eps scaling slope", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream notes;
  for (const auto& [label, model] :
       {std::pair{"Cantor", cantor_spray()}, std::pair{"square", unit_square_spray()}}) {
    const double target = model.dimension() - similarity_dimension(model.ratios).value;
    const double slope = scaling_exponent_fit(model, 30);
    const bool within = std::abs(slope - target) <= 0.05;
    ok = ok && within;
    notes << "; " << label << ": slope " << fixed(slope, 4) << " vs n-D " << fixed(target, 4);
    if (!within) {
      notes << " (outside +/-0.05; with integer-pole terms removed the slope is "
            << fixed(scaling_exponent_fit_corrected(model, 30), 4) << ")";
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = ok;
  r.detail = notes.str().substr(2);
  return r;
}

CriterionResult inversion_crosscheck() {
  CriterionResult r{10, "Inverse Mellin cross-check", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const SprayModel cantor = cantor_spray();
  const SprayModel square = unit_square_spray();
  double worst = 0.0;
  std::ostringstream notes;
  auto check = [&](const SprayModel& model, double eps) {
    const double c = default_inversion_abscissa(model);
    const double err =
        std::abs(inverse_mellin_numeric(model, eps, c, 200.0) - direct_tube_volume(model, eps));
    worst = std::max(worst, err);
    notes << " " << fixed(eps) << ":" << sci(err);
  };
  for (double eps : {0.1, 1.0 / 18.0, 0.25}) check(cantor, eps);
  for (double eps : {0.25, 0.0625, 0.6}) check(square, eps);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 1e-2;
  r.detail = "max |err| = " + sci(worst) + ";" + notes.str();
  return r;
}

CriterionResult guarded(int id, const char* name, CriterionResult (*criterion)()) {
  try {
    return criterion();
  } catch (const Error& e) {
    return {id, name, false, std::string(to_string(e.kind())) + ": " + e.what(), 0.0};
  }
}

}  // namespace

std::vector<CriterionResult> run_all() {
  return {
      guarded(1, "Moran closed forms", moran_closed_forms),
      guarded(2, "Lattice zeros exact", lattice_zeros_exact),
      guarded(3, "Winding completeness", winding_completeness),
      guarded(4, "Functional equation", functional_equation),
      guarded(5, "Constant regime", constant_regime),
      guarded(6, "Mellin numerator identity", mellin_identity),
      guarded(7, "Residue formula agreement (Cantor)", residue_agreement),
      guarded(8, "Nonlattice residue agreement (square)", nonlattice_agreement),
      guarded(9, "Small-eps scaling slope", scaling_slope),
      guarded(10, "Inverse Mellin cross-check", inversion_crosscheck),
  };
}

void write_report(std::ostream& out, const std::vector<CriterionResult>& results,
                  bool with_timing) {
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": " << r.detail;
    if (with_timing) out << " [" << fixed(r.seconds, 3) << " s]";
    out << '\n';
  }
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace tubeforge::acceptance
