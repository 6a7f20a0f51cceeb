#include <cmath>
#include <random>

#include "doctest.h"
#include "tubeforge/direct.hpp"
#include "tubeforge/errors.hpp"
#include "tubeforge/moran.hpp"
#include "tubeforge/verification.hpp"

using namespace tubeforge;

namespace {

std::vector<double> factors(const std::vector<ScalingWord>& words) {
  std::vector<double> out;
  for (const auto& w : words) out.push_back(w.factor);
  return out;
}

}  // namespace

TEST_CASE("word enumeration") {
  const RatioList cantor({1.0 / 3, 1.0 / 3});
  auto words = enumerate_words(cantor, 0.2);
  REQUIRE(words.size() == 3);
  CHECK(words[0].factor == 1.0);
  CHECK(words[0].depth() == 0);
  CHECK(words[1].factor == doctest::Approx(1.0 / 3));

  words = enumerate_words(cantor, 0.05);
  REQUIRE(words.size() == 7);
  CHECK(std::count_if(words.begin(), words.end(),
                      [](const ScalingWord& w) { return std::abs(w.factor - 1.0 / 9) < 1e-15; }) == 4);

  const auto mixed = factors(enumerate_words(RatioList({0.5, 1.0 / 3}), 0.3));
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[1] == 0.5);
  CHECK(mixed[2] == doctest::Approx(1.0 / 3));

  CHECK(enumerate_words(cantor, 1.0).empty());
  CHECK_THROWS_AS(enumerate_words(cantor, 0.0), Error);
}

TEST_CASE("word factors are exact products in descending order") {
  const RatioList ratios({0.5, 1.0 / 3, 0.25});
  const auto words = enumerate_words(ratios, 1e-3);
  for (std::size_t k = 0; k < words.size(); ++k) {
    double product = 1.0;
    for (auto letter : words[k].letters) product *= ratios[letter];
    CHECK(std::abs(product - words[k].factor) <= 1e-15 * product);
    CHECK(words[k].factor > 1e-3);
    if (k > 0) CHECK(words[k].factor <= words[k - 1].factor);
  }
}

TEST_CASE("word guard") {
  try {
    enumerate_words(RatioList({0.9, 0.9, 0.9}), 1e-12);
    FAIL("expected resource error");
  } catch (const ResourceError& e) {
    CHECK(e.kind() == ErrorKind::Resource);
    CHECK(e.count() > kWordGuard);
  }
  std::vector<double> nine;
  for (int j = 0; j < 9; ++j) nine.push_back(0.1 + 0.001 * j);
  CHECK_THROWS_AS(direct_tube_volume(SprayModel{RatioList(nine), MonophaseGenerator(1, {2.0}, 0.5, 1.0)},
                                     1e-300),
                  ResourceError);
}

TEST_CASE("cantor closed values") {
  const auto cantor = cantor_spray();
  CHECK(direct_tube_volume(cantor, 1.0 / 18) == doctest::Approx(7.0 / 9).epsilon(1e-14));
  CHECK(direct_tube_volume(cantor, 0.1) == doctest::Approx(13.0 / 15).epsilon(1e-14));
  CHECK(direct_tube_volume(cantor, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(direct_tube_volume(cantor, 0.0), Error);
}

TEST_CASE("functional equation residual") {
  CHECK(std::abs(functional_equation_residual(cantor_spray(), 1.0 / 18)) < 1e-14);
  CHECK(std::abs(functional_equation_residual(cantor_spray(), 10.0)) < 1e-14);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-4, 5.0);
  for (int k = 0; k < 50; ++k) {
    const double eps = u(rng);
    const auto model = unit_square_spray();
    CHECK(std::abs(functional_equation_residual(model, eps)) <
          1e-12 * direct_tube_volume(model, eps));
  }
}

TEST_CASE("multiset oracle agrees with per-word oracle") {
  for (const auto& model : {cantor_spray(), unit_square_spray()}) {
    for (double eps : {1e-4, 3e-3, 0.01, 0.07, 0.11, 0.3}) {
      CHECK(direct_tube_volume(model, eps) ==
            doctest::Approx(verification::direct_tube_volume_by_words(model, eps)).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact at word boundaries") {
  // eps = g * lambda for lambda = 1/9 puts four words exactly on the split.
  const auto cantor = cantor_spray();
  const double eps = cantor.inradius() / 9;
  const double v = direct_tube_volume(cantor, eps);
  CHECK(v == doctest::Approx(verification::direct_tube_volume_by_words(cantor, eps)).epsilon(1e-12));
  CHECK(v == doctest::Approx(direct_tube_volume(cantor, std::nextafter(eps, 1.0))).epsilon(1e-12));
}

TEST_CASE("monotone in eps") {
  for (const auto& model : {cantor_spray(), unit_square_spray()}) {
    double previous = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double eps = 1e-5 * std::pow(10.0, 5.0 * k / 400);
      const double v = direct_tube_volume(model, eps);
      CHECK(v >= previous * (1 - 1e-14));
      previous = v;
    }
  }
}

TEST_CASE("homogeneity under generator scaling") {
  const auto base = unit_square_spray();
  const double c = 3.0;
  const SprayModel big{base.ratios, MonophaseGenerator(2, {-4.0, 4.0 * c}, c * 0.5, c * c)};
  for (double eps : {0.001, 0.02, 0.3, 0.6}) {
    CHECK(direct_tube_volume(big, c * eps) ==
          doctest::Approx(c * c * direct_tube_volume(base, eps)).epsilon(1e-12));
  }
}

TEST_CASE("scaling exponent") {
  const auto cantor = cantor_spray();
  const double target = 1.0 - similarity_dimension(cantor.ratios).value;
  const double slope30 = scaling_exponent_fit(cantor, 30);
  CHECK(std::abs(slope30 - target) < 0.05);
  CHECK(std::abs(scaling_exponent_fit(cantor, 8) - slope30) < 0.1);
  CHECK_THROWS_AS(scaling_exponent_fit(cantor, 4), Error);

  const auto square = unit_square_spray();
  const double square_target = 2.0 - similarity_dimension(square.ratios).value;
  CHECK(std::abs(scaling_exponent_fit_corrected(square, 30) - square_target) < 0.01);
}

TEST_CASE("bounded oscillation of the normalized volume") {
  for (const auto& model : {cantor_spray(), unit_square_spray()}) {
    const auto bound = scaling_bound(model, 40);
    CHECK(std::isfinite(bound.max_ratio));
    CHECK(bound.min_ratio > 0.0);
    CHECK(bound.oscillation() < 100.0);
  }
}
