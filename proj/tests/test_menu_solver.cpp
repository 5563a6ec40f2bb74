#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "infomenu/config.hpp"
#include "infomenu/errors.hpp"
#include "infomenu/menu_solver.hpp"

using namespace infomenu;

namespace {

// The printed linear first-order condition of the quadratic/uniform example,
// 1 + 2 mu^2 - 3.5 mu + (2 mu - 1) nu = 0, solved for nu.
double printed_nu(double mu) { return (3.5 * mu - 2 * mu * mu - 1) / (2 * mu - 1); }

// Root of 4 mu^2 - 4.5 mu + 1 = 0 above 0.75: where printed_nu(mu) = mu.
const double kExclusionHi = (4.5 + std::sqrt(4.25)) / 8.0;

const OptimalMenu& golden() {
  static const OptimalMenu m = build_menu(ValueFunction::quadratic(), BeliefDensity::uniform());
  return m;
}

}  // namespace

TEST_CASE("thresholds") {
  const auto t = solve_thresholds(BeliefDensity::uniform(), 0.5);
  CHECK(t.mu_minus == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t.mu_plus == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(t.mu0 == doctest::Approx(0.5).epsilon(1e-14));
  const auto tri = solve_thresholds(BeliefDensity::triangular(), 0.5);
  CHECK(tri.mu_plus == doctest::Approx(1.0 - 1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(tri.mu0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(solve_thresholds(BeliefDensity::uniform(), 1.0), DomainError);
}

TEST_CASE("first-order posteriors follow the printed linear condition") {
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  CHECK(solve_foc_posterior(0.8, 0.5, v, f).posterior == doctest::Approx(13.0 / 15.0).epsilon(1e-12));
  CHECK(solve_foc_posterior(0.75, 0.5, v, f).posterior == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solve_foc_posterior(0.2, 0.5, v, f).posterior == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  for (int i = 1; i <= 20; ++i) {
    const double mu = 0.75 + (kExclusionHi - 0.75) * i / 21.0;
    const auto s = solve_foc_posterior(mu, 0.5, v, f);
    CHECK(std::abs(s.posterior - printed_nu(mu)) < 1e-8);
    CHECK(std::abs(foc_residual(Side::high, mu, s.posterior, 0.5, v, f)) < 1e-8);
  }
}

TEST_CASE("noise from posterior") {
  CHECK(noise_from_posterior(0.8, 13.0 / 15.0, Orientation::reveal_l) == doctest::Approx(5.0 / 13.0).epsilon(1e-12));
  CHECK(noise_from_posterior(0.8, 0.8, Orientation::reveal_l) == 0.0);
  CHECK(noise_from_posterior(0.8, 1.0, Orientation::reveal_l) == 1.0);
  CHECK_THROWS_AS(noise_from_posterior(0.8, 0.5, Orientation::reveal_l), DomainError);
  // Round trip through Bayes.
  const double p = noise_from_posterior(0.3, 0.1, Orientation::reveal_h);
  CHECK(posterior(SimpleExperiment::reveal_h(p), 1, 0.3) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("exclusion points") {
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  CHECK(std::abs(exclusion_point(0.5, v, f, Side::high) - kExclusionHi) < 1e-10);
  CHECK(std::abs(exclusion_point(0.5, v, f, Side::low) - (1.0 - kExclusionHi)) < 1e-10);
}

TEST_CASE("multiplier") {
  const auto v = ValueFunction::quadratic();
  CHECK(solve_lambda(v, BeliefDensity::uniform()) == 0.5);
  CHECK(solve_lambda(v, BeliefDensity::triangular()) == 0.5);
  const auto tilted = BeliefDensity::tilted(0.1);
  LambdaTrace trace;
  const double lambda = solve_lambda(v, tilted, {}, &trace);
  CHECK(std::abs(lambda - 0.5) > 1e-3);
  CHECK(std::abs(lambda_residual(lambda, v, tilted, 1001)) < 1e-8);
  CHECK_FALSE(trace.lambdas.empty());
}

TEST_CASE("golden menu shape") {
  const auto& m = golden();
  const auto& t = m.thresholds;
  CHECK(t.lambda == 0.5);
  CHECK(std::abs(t.exclusion_hi - 0.820194) < 1e-6);
  CHECK(std::abs(t.exclusion_lo - 0.179806) < 1e-6);

  double flat_price = -1.0;
  for (const auto& r : m.records) {
    CHECK(r.price >= -1e-12);
    CHECK(r.surplus >= -1e-12);
    const auto o = r.contract.orientation;
    if (r.mu >= t.mu_minus && r.mu <= t.mu_plus) {
      CHECK(o == Orientation::full);
      if (flat_price < 0) flat_price = r.price;
      CHECK(r.price == doctest::Approx(flat_price).epsilon(1e-12));
    } else if (r.mu < t.exclusion_lo || r.mu > t.exclusion_hi) {
      CHECK(o == Orientation::null);
      CHECK(r.price == 0.0);
      CHECK(r.surplus == 0.0);
    } else if (r.mu > t.mu_plus && r.mu < t.exclusion_hi) {
      CHECK(o == Orientation::reveal_l);
      CHECK(r.posterior > r.mu);
      CHECK(r.posterior < 1.0);
      CHECK(std::abs(foc_residual(Side::high, r.mu, r.posterior, 0.5, ValueFunction::quadratic(),
                                  BeliefDensity::uniform())) < 1e-8);
    } else if (r.mu < t.mu_minus && r.mu > t.exclusion_lo) {
      CHECK(o == Orientation::reveal_h);
      CHECK(r.posterior < r.mu);
      CHECK(r.posterior > 0.0);
    }
  }
  CHECK(m.surplus_at(t.exclusion_hi) < 1e-6);
  CHECK(m.surplus_at(t.exclusion_lo) < 1e-6);
  CHECK(m.surplus_at(0.0) == 0.0);
  CHECK(m.surplus_at(1.0) == 0.0);
}

TEST_CASE("noise is monotone on the partial-revelation bands") {
  const auto& m = golden();
  const auto& t = m.thresholds;
  double prev = 2.0;
  for (const auto& r : m.records) {
    if (r.mu > t.mu_plus && r.mu < t.exclusion_hi) {
      CHECK(r.contract.noise < prev);
      prev = r.contract.noise;
    }
  }
  prev = -1.0;
  for (const auto& r : m.records) {
    if (r.mu > t.exclusion_lo && r.mu < t.mu_minus) {
      CHECK(r.contract.noise > prev);
      prev = r.contract.noise;
    }
  }
}

TEST_CASE("symmetric instance gives a symmetric menu") {
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  const auto& t = golden().thresholds;
  for (double mu = 0.76; mu < 0.82; mu += 0.005) {
    const auto hi = contract_at(mu, t, v, f);
    const auto lo = contract_at(1.0 - mu, t, v, f);
    CHECK(hi.orientation == Orientation::reveal_l);
    CHECK(lo.orientation == Orientation::reveal_h);
    CHECK(std::abs(hi.noise - lo.noise) < 1e-9);
  }
}

TEST_CASE("envelope identity") {
  // Surplus from the price schedule equals the buyer's best net gain from the
  // whole menu, and its slope equals dDeltaV/dmu at the own contract.
  const auto v = ValueFunction::quadratic();
  const auto& m = golden();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.records.size(); i += 7) {
    const double mu = m.records[i].mu;
    double best = 0.0;
    for (const auto& r : m.records) best = std::max(best, delta_v(mu, r.contract, v) - r.price);
    worst = std::max(worst, std::abs(best - m.records[i].surplus));
  }
  CHECK(worst < 1e-4);
  const double h = 1e-3;
  for (double mu : {0.19, 0.22, 0.3, 0.6, 0.78, 0.81}) {
    const double fd = (m.surplus_at(mu + h) - m.surplus_at(mu - h)) / (2 * h);
    const auto c = contract_at(mu, m.thresholds, v, BeliefDensity::uniform());
    CHECK(std::abs(fd - delta_v_mu(mu, c, v)) < 1e-4);
  }
}

TEST_CASE("revenue") {
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  std::vector<MenuRecord> nulls(11);
  for (std::size_t i = 0; i < nulls.size(); ++i) nulls[i].mu = i / 10.0;
  CHECK(revenue(nulls, f) == 0.0);
  CHECK(golden().revenue >= 1.0 / (6.0 * std::sqrt(3.0)) - 1e-9);

  MenuOptions fine;
  fine.grid = 2001;
  const auto m2 = build_menu(v, f, fine);
  CHECK(std::abs(m2.revenue - golden().revenue) / golden().revenue < 1e-6);
}

TEST_CASE("flat price") {
  const auto f = BeliefDensity::uniform();
  SUBCASE("quadratic: p = 1/6 from maximizing p sqrt(1 - 4p)") {
    const auto fp = flat_price_optimum(ValueFunction::quadratic(), f);
    CHECK(std::abs(fp.price - 1.0 / 6.0) < 1e-4);
    CHECK(std::abs(fp.revenue - 1.0 / (6.0 * std::sqrt(3.0))) < 1e-4);
    REQUIRE(fp.served.size() == 1);
    const double edge = (1.0 - std::sqrt(1.0 - 4.0 * fp.price)) / 2.0;
    CHECK(fp.served[0].first == doctest::Approx(edge).epsilon(1e-9));
    CHECK(fp.served[0].second == doctest::Approx(1.0 - edge).epsilon(1e-9));
    CHECK(flat_revenue(ValueFunction::quadratic(), f, 1.0 / 6.0) ==
          doctest::Approx(1.0 / (6.0 * std::sqrt(3.0))).epsilon(1e-12));
  }
  SUBCASE("linear value earns nothing") {
    CHECK(flat_price_optimum(ValueFunction::polynomial({0.2, 0.3}), f).revenue == 0.0);
  }
  SUBCASE("four-action table agrees with a grid search") {
    const auto v = ValueFunction::from_actions(four_action_table());
    const auto fp = flat_price_optimum(v, f);
    const int n = 6000;
    double best = 0.0;
    for (int k = 1; k < 400; ++k) {
      const double p = 0.25 * k / 400.0;
      int served = 0;
      for (int i = 0; i < n; ++i) {
        const double mu = (i + 0.5) / n;
        if (mu * v(1.0) + (1 - mu) * v(0.0) - v(mu) >= p) ++served;
      }
      best = std::max(best, p * served / n);
    }
    CHECK(std::abs(fp.revenue - best) < 1e-3);
    CHECK(fp.price == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    CHECK(fp.revenue == doctest::Approx(1.0 / 9.0).epsilon(1e-6));
  }
}

TEST_CASE("refusals") {
  const auto table = ValueFunction::from_actions(four_action_table());
  CHECK_THROWS_AS(build_menu(table, BeliefDensity::uniform()), UnsupportedKind);
  try {
    build_menu(table, BeliefDensity::uniform());
  } catch (const UnsupportedKind& e) {
    CHECK(std::string(e.what()).find("C2") != std::string::npos);
  }
  const auto spiked = BeliefDensity::piecewise_linear({0.0, 0.86, 0.9, 0.94, 1.0}, {1.0, 1.0, 12.0, 1.0, 1.0});
  CHECK_THROWS_AS(build_menu(ValueFunction::quadratic(), spiked), AssumptionRefusal);
  MenuOptions o;
  o.override_assumptions = true;
  const auto m = build_menu(ValueFunction::quadratic(), spiked, o);
  CHECK(std::any_of(m.warnings.begin(), m.warnings.end(),
                    [](const std::string& w) { return w.find("overridden") != std::string::npos; }));
}
