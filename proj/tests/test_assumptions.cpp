#include <doctest.h>

#include <cmath>

#include "infomenu/assumptions.hpp"
#include "infomenu/errors.hpp"
#include "infomenu/menu_solver.hpp"

using namespace infomenu;

namespace {

// Uniform background with a narrow spike at 0.9.
BeliefDensity spiked() {
  return BeliefDensity::piecewise_linear({0.0, 0.86, 0.9, 0.94, 1.0}, {1.0, 1.0, 12.0, 1.0, 1.0}, "spiked");
}

}  // namespace

TEST_CASE("monotone likelihood ratio") {
  const auto grid = interior_grid(512);
  const auto u = BeliefDensity::uniform();
  SUBCASE("uniform passes at the symmetric multiplier") {
    const double l[] = {0.5};
    CHECK(check_mlr(u, l, grid).pass);
  }
  SUBCASE("uniform passes at shifted multipliers") {
    const double l[] = {0.3, 0.7};
    CHECK(check_mlr(u, l, grid).pass);
  }
  SUBCASE("ratio on the high side is (1-mu)/(mu-0.5) for uniform") {
    for (double mu : {0.6, 0.75, 0.9}) {
      CHECK(mlr_ratio_high(u, 0.5, mu) == doctest::Approx((1 - mu) / (mu - 0.5)).epsilon(1e-13));
    }
  }
  SUBCASE("a density spike breaks the ratio and is located") {
    const double l[] = {0.5};
    const auto r = check_mlr(spiked(), l, grid);
    CHECK_FALSE(r.pass);
    REQUIRE(r.mu.has_value());
    CHECK(*r.mu > 0.8);
    CHECK(*r.mu < 0.95);
    CHECK(r.worst_violation > 0.0);
  }
}

TEST_CASE("supermodularity and virtual values") {
  const auto grid = interior_grid(512);
  const auto u = BeliefDensity::uniform();
  SupermodParams p;
  p.mu_lo = 0.2;
  p.mu_hi = 0.8;
  SUBCASE("quadratic value with symmetric parameters passes") {
    CHECK(check_supermod_virtual(ValueFunction::quadratic(), u, p, grid, false).pass);
    CHECK(check_supermod_virtual(ValueFunction::quadratic(), u, p, grid, true).pass);
  }
  SUBCASE("linear value fails the strict conditions") {
    CHECK_FALSE(check_supermod_virtual(ValueFunction::polynomial({0.1, 0.3}), u, p, grid, false).pass);
  }
  SUBCASE("a non-monotone density is flagged by the virtual-value terms") {
    p.mu_lo = 0.1;
    p.mu_hi = 0.9;
    const auto r = check_supermod_virtual(ValueFunction::quadratic(), spiked(), p, grid, true);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("action tables are refused") {
    const auto t = ValueFunction::from_actions({{0.0, 1.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(check_supermod_virtual(t, u, p, grid), UnsupportedKind);
  }
}

TEST_CASE("single crossing") {
  const auto v = ValueFunction::quadratic();
  CHECK(scd_high(v, 0.8, 0.9) < 0.0);
  CHECK(std::abs(scd_high(v, 0.8, 0.0)) <= 1e-12);
  CHECK(std::abs(scd_low(v, 0.2, 1.0)) <= 1e-12);

  // 64 x 64 grid per side over the posteriors the menu uses: reveal-l
  // posteriors lie in [mu_plus, 1), reveal-h posteriors in (0, mu_minus].
  std::vector<GridPoint> pts;
  for (double mu : interior_grid(64, 0.5, 1.0)) {
    pts.push_back({mu, 0.75});
    for (double nu : interior_grid(63, 0.75, 1.0)) pts.push_back({mu, nu});
  }
  for (double mu : interior_grid(64, 0.0, 0.5)) {
    pts.push_back({mu, 0.25});
    for (double nu : interior_grid(63, 0.0, 0.25)) pts.push_back({mu, nu});
  }
  const auto r = scd_signs(v, 0.5, pts);
  CHECK(r.pass);
  CHECK(r.points_checked >= 2 * 64 * 64);

  // For the quadratic the high-side cross derivative is nu^2 (2(1 - nu)/mu - 1),
  // negative only above 1 - mu/2; a point below that is reported.
  CHECK(scd_high(v, 0.8, 0.5) == doctest::Approx(0.25 * (2 * 0.5 / 0.8 - 1)).epsilon(1e-14));
  const GridPoint bad[] = {{0.8, 0.5}};
  const auto f = scd_signs(v, 0.5, bad);
  CHECK_FALSE(f.pass);
  REQUIRE(f.nu.has_value());
  CHECK(*f.nu == 0.5);
}

TEST_CASE("H-function scan") {
  const auto v = ValueFunction::quadratic();
  const auto u = BeliefDensity::uniform();
  const auto nus = interior_grid(256);
  const auto s = h_scan(0.6, 0.5, v, u, nus);
  CHECK(s.pass);
  CHECK(s.region == 2);
  CHECK(s.h1 != Monotonicity::none);
  const auto g = h_scan(0.5, 0.5, v, u, nus);
  CHECK(g.guarded);
  const auto far = h_scan(0.3, 0.05, v, u, nus);
  CHECK(far.region == 1);
  CHECK_FALSE(far.required.empty());
}

TEST_CASE("exclusion bound") {
  const auto u = BeliefDensity::uniform();
  SUBCASE("linear value has zero revenue and fails the strict bound") {
    const auto r = check_exclusion_bound(ValueFunction::polynomial({0.0, 1.0}), u, 0.5, 0.5, 0.0);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("symmetric case evaluates the chord gap at the menu thresholds") {
    const auto r = check_exclusion_bound(ValueFunction::quadratic(), u, 0.5, 0.5, 0.0969401);
    REQUIRE(r.mu.has_value());
    const double m = *r.mu;
    CHECK((std::abs(m - 0.75) < 1e-12 || std::abs(m - 0.25) < 1e-12));
    // Chord gap at 0.75 is 0.1875, above the menu revenue.
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.inconclusive);
  }
}

TEST_CASE("gating checks on the golden instance") {
  const auto v = ValueFunction::quadratic();
  const auto u = BeliefDensity::uniform();
  const auto t = menu_thresholds(0.5, v, u);
  for (const auto& r : check_assumptions(v, u, t, 512)) CHECK_MESSAGE(r.pass, r.condition);
}
