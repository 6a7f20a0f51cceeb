#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tubeforge/complex_dimensions.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"

using namespace tubeforge;
using std::numbers::pi;

namespace {

bool has_zero(const std::vector<ComplexDimension>& zeros, cplx w, double tol) {
  for (const auto& z : zeros) {
    if (std::abs(z.omega - w) < tol) return true;
  }
  return false;
}

int multiplicity_sum(const std::vector<ComplexDimension>& zeros) {
  int total = 0;
  for (const auto& z : zeros) total += z.multiplicity;
  return total;
}

void check_conjugate_closed(const std::vector<ComplexDimension>& zeros) {
  for (const auto& z : zeros) CHECK(has_zero(zeros, std::conj(z.omega), 1e-8));
}

}  // namespace

TEST_CASE("dirichlet polynomial") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  const DirichletPolynomial f(cantor);
  const double d = std::log(2.0) / std::log(3.0);
  CHECK(std::abs(f.value(d)) < 1e-15);
  CHECK(f.derivative(d).real() == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const cplx s(0.3, 2.0);
  const double h = 1e-6;
  const cplx numeric = (f.value(s + h) - f.value(s - h)) / (2 * h);
  CHECK(std::abs(numeric - f.derivative(s)) < 1e-8);
}

TEST_CASE("lattice detection") {
  auto a = detect_lattice(RatioList({1.0 / 3, 1.0 / 3}));
  CHECK(a.is_lattice);
  CHECK(a.base == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(a.exponents == std::vector<int>{1, 1});
  CHECK(a.period == doctest::Approx(2 * pi / std::log(3.0)).epsilon(1e-12));

  auto b = detect_lattice(RatioList({0.25, 1.0 / 16}));
  CHECK(b.is_lattice);
  CHECK(b.base == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b.exponents == std::vector<int>{1, 2});
  CHECK(b.period == doctest::Approx(4.5323601).epsilon(1e-7));

  auto c = detect_lattice(RatioList({0.5, 0.125, 0.25}));
  CHECK(c.is_lattice);
  CHECK(c.exponents == std::vector<int>{1, 2, 3});

  CHECK_FALSE(detect_lattice(RatioList({0.5, 1.0 / 3})).is_lattice);
  CHECK_FALSE(detect_lattice(RatioList({0.5, 1.0 / 3, 0.25})).is_lattice);
}

TEST_CASE("lattice zeros") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  const double d = std::log(2.0) / std::log(3.0);
  const double p = 2 * pi / std::log(3.0);
  auto zeros = lattice_zeros(detect_lattice(cantor), cantor, 12.0);
  REQUIRE(zeros.size() == 5);
  for (int k = -2; k <= 2; ++k) CHECK(has_zero(zeros, cplx(d, k * p), 1e-9));

  const RatioList quad({0.25, 1.0 / 16});
  zeros = lattice_zeros(detect_lattice(quad), quad, 5.0);
  REQUIRE(zeros.size() == 5);
  const double re = std::log((1 + std::sqrt(5.0)) / 2) / std::log(4.0);
  const double q = 2 * pi / std::log(4.0);
  for (int k = -1; k <= 1; ++k) CHECK(has_zero(zeros, cplx(re, k * q), 1e-9));
  CHECK(has_zero(zeros, cplx(-re, q / 2), 1e-9));
  CHECK(has_zero(zeros, cplx(-re, -q / 2), 1e-9));

  const RatioList triple({0.5, 0.5, 0.5});
  zeros = lattice_zeros(detect_lattice(triple), triple, 1.0);
  REQUIRE(zeros.size() == 1);
  CHECK(zeros[0].omega.real() == doctest::Approx(std::log2(3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(lattice_zeros(detect_lattice(RatioList({0.5, 1.0 / 3})), RatioList({0.5, 1.0 / 3}), 5.0),
                  Error);
}

TEST_CASE("lattice periodicity") {
  const RatioList ratios({0.5, 0.25, 0.125});
  const auto lattice = detect_lattice(ratios);
  const auto zeros = lattice_zeros(lattice, ratios, 40.0);
  REQUIRE(zeros.size() > 10);
  const cplx shift(0.0, lattice.period);
  for (const auto& z : zeros) {
    if (std::abs((z.omega + shift).imag()) < 40.0 - 1e-6) CHECK(has_zero(zeros, z.omega + shift, 1e-8));
    if (std::abs((z.omega - shift).imag()) < 40.0 - 1e-6) CHECK(has_zero(zeros, z.omega - shift, 1e-8));
  }
}

TEST_CASE("rectangle counts") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  CHECK(count_zeros_rectangle(cantor, {-1, 1, -6, 6}) == 3);
  CHECK(count_zeros_rectangle(cantor, {-1, 1, 1, 5}) == 0);
  CHECK(count_zeros_rectangle(RatioList({0.5, 0.5, 0.5}), {1, 2, -1, 1}) == 1);
}

TEST_CASE("zero on the contour") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  const double d = std::log(2.0) / std::log(3.0);
  const Rect edge{d, 2.0, -1.0, 1.0};
  CHECK_THROWS_AS(count_zeros_rectangle(cantor, edge), Error);
  Rect used{};
  CHECK(count_zeros_perturbed(cantor, edge, &used) == 1);
  CHECK(used.re_lo < d);
}

TEST_CASE("newton refinement") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  const double d = std::log(2.0) / std::log(3.0);
  auto z = refine_zero(cantor, {0.6, 0.1});
  CHECK(std::abs(z.omega - cplx(d, 0)) < 1e-10);
  CHECK(z.residual < 1e-12);
  z = refine_zero(cantor, {0.6, 5.5});
  CHECK(std::abs(z.omega - cplx(d, 2 * pi / std::log(3.0))) < 1e-10);
  z = refine_zero(RatioList({0.5, 0.5, 0.5}), {1.5, 0.2});
  CHECK(std::abs(z.omega - cplx(std::log2(3.0), 0)) < 1e-10);
}

TEST_CASE("zero-free left bound") {
  const RatioList ratios({0.5, 1.0 / 3});
  const double sigma = zero_free_left_bound(ratios);
  CHECK(sigma < 0.0);
  // domination holds strictly left of the bound
  const double left = sigma - 0.01;
  CHECK(std::pow(1.0 / 3, left) > 1.0 + std::pow(0.5, left));
}

TEST_CASE("cantor search uses the lattice structure") {
  const auto search = find_complex_dimensions(RatioList({1.0 / 3, 1.0 / 3}), 12.0);
  CHECK(search.lattice);
  CHECK(search.zeros.size() == 5);
  CHECK(multiplicity_sum(search.zeros) == search.window_count);
}

TEST_CASE("nonlattice search is complete and accurate") {
  const RatioList ratios({0.5, 1.0 / 3});
  const double d = similarity_dimension(ratios).value;
  const auto search = find_complex_dimensions(ratios, 20.0);
  CHECK_FALSE(search.lattice);
  CHECK(multiplicity_sum(search.zeros) == count_zeros_rectangle(ratios, search.window));
  CHECK(multiplicity_sum(search.zeros) == search.window_count);
  int real_zeros = 0;
  for (const auto& z : search.zeros) {
    CHECK(z.residual < 1e-10);
    CHECK(z.omega.real() <= d + 1e-9);
    if (std::abs(z.omega.imag()) < 1e-9) {
      ++real_zeros;
      CHECK(std::abs(z.omega.real() - d) < 1e-10);
    }
  }
  CHECK(real_zeros == 1);
  CHECK(d == doctest::Approx(0.7879).epsilon(1e-4));
  check_conjugate_closed(search.zeros);
  for (std::size_t k = 1; k < search.zeros.size(); ++k) {
    const auto& a = search.zeros[k - 1].omega;
    const auto& b = search.zeros[k].omega;
    CHECK((a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real())));
  }
}

TEST_CASE("square spray search") {
  const RatioList ratios({0.5, 1.0 / 3, 0.25});
  const auto search = find_complex_dimensions(ratios, 60.0);
  CHECK(multiplicity_sum(search.zeros) == search.window_count);
  check_conjugate_closed(search.zeros);
  for (const auto& z : search.zeros) CHECK(z.residual < 1e-10);
}

TEST_CASE("lattice list with negative real parts") {
  const auto search = find_complex_dimensions(RatioList({0.25, 1.0 / 16}), 5.0);
  CHECK(search.zeros.size() == 5);
}

TEST_CASE("model overload rejects zeros at integer poles") {
  // {1/2, 1/2}: D = 1 = n - 1 for a planar generator
  const SprayModel model{RatioList({0.5, 0.5}), MonophaseGenerator(2, {-4.0, 4.0}, 0.5, 1.0)};
  try {
    find_complex_dimensions(model, 5.0);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}
