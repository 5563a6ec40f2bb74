#include <doctest.h>

#include <cmath>
#include <random>

#include "infomenu/core_model.hpp"
#include "infomenu/errors.hpp"

using namespace infomenu;

namespace {

// Bayes by hand for the two-signal experiments.
struct Split {
  double p0, post0, p1, post1;
};

Split split(const SimpleExperiment& e, double mu) {
  switch (e.orientation) {
    case Orientation::reveal_h: {
      const double p = e.noise;
      const double p1 = mu * (1.0 - p) + (1.0 - mu);
      return {mu * p, 1.0, p1, mu * (1.0 - p) / p1};
    }
    case Orientation::reveal_l: {
      const double q = e.noise;
      const double p1 = mu + (1.0 - mu) * (1.0 - q);
      return {(1.0 - mu) * q, 0.0, p1, mu / p1};
    }
    case Orientation::full: return {mu, 1.0, 1.0 - mu, 0.0};
    case Orientation::null: return {1.0, mu, 0.0, mu};
  }
  return {};
}

double gain_by_definition(const SimpleExperiment& e, double mu, const ValueFunction& v) {
  const auto s = split(e, mu);
  double u = 0.0;
  if (s.p0 > 0.0) u += s.p0 * v(s.post0);
  if (s.p1 > 0.0) u += s.p1 * v(s.post1);
  return u - v(mu);
}

}  // namespace

TEST_CASE("posterior examples") {
  CHECK(posterior(SimpleExperiment::reveal_l(0.5), 1, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(posterior(SimpleExperiment::null(), 0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(posterior(SimpleExperiment::full(), 0, 0.5) == 1.0);
}

TEST_CASE("posteriors average back to the prior") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double mu = u(rng);
    const double n = u(rng);
    for (auto e : {SimpleExperiment::reveal_h(n), SimpleExperiment::reveal_l(n), SimpleExperiment::full(),
                   SimpleExperiment::null()}) {
      const auto g = e.to_general();
      double mean = 0.0;
      for (std::size_t s = 0; s < g.size(); ++s) {
        const double p = signal_probability(g.signals()[s], mu);
        if (p > 0.0) mean += p * posterior(g, s, mu);
      }
      CHECK(std::abs(mean - mu) < 1e-12);
    }
  }
}

TEST_CASE("experiment value examples") {
  const auto v = ValueFunction::quadratic();
  CHECK(std::abs(experiment_value(SimpleExperiment::full(), 0.5, v)) < 1e-15);
  CHECK(experiment_value(SimpleExperiment::null(), 0.3, v) == doctest::Approx(v(0.3)).epsilon(1e-15));
  // Mass 12/13 at posterior 13/15.
  CHECK(experiment_value(SimpleExperiment::reveal_l(5.0 / 13.0), 0.8, v) ==
        doctest::Approx(12.0 / 13.0 * v(13.0 / 15.0)).epsilon(1e-12));
  CHECK(experiment_value(SimpleExperiment::reveal_l(0.38462), 0.8, v) == doctest::Approx(-0.106667).epsilon(1e-5));
}

TEST_CASE("delta_v branch formula agrees with the definition") {
  const auto q = ValueFunction::quadratic();
  const auto cubic = ValueFunction::polynomial({0.0, -0.3, 0.2, 0.5});
  const auto table = ValueFunction::from_actions({{0.0, 0.0}, {-0.4, 0.6}, {0.5, -0.5}, {-0.1, 0.2}});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto* v : {&q, &cubic, &table}) {
    for (int i = 0; i < 1000; ++i) {
      const double mu = u(rng), n = u(rng);
      for (auto e : {SimpleExperiment::reveal_h(n), SimpleExperiment::reveal_l(n), SimpleExperiment::full(),
                     SimpleExperiment::null()}) {
        CHECK(std::abs(delta_v(mu, e, *v) - gain_by_definition(e, mu, *v)) < 1e-12);
      }
    }
  }
  CHECK(delta_v(0.8, SimpleExperiment::reveal_l(1.0), q) == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(delta_v(0.8, SimpleExperiment::reveal_l(0.0), q) == 0.0);
  CHECK(delta_v(0.8, SimpleExperiment::reveal_l(0.38462), q) == doctest::Approx(0.053333).epsilon(1e-5));
}

TEST_CASE("delta_v_mu matches centered finite differences") {
  const auto q = ValueFunction::quadratic();
  const auto cubic = ValueFunction::polynomial({0.0, -0.3, 0.2, 0.5});
  CHECK(delta_v_mu(0.8, SimpleExperiment::reveal_l(1.0), q) == doctest::Approx(-0.6).epsilon(1e-13));
  CHECK(delta_v_mu(0.3, SimpleExperiment::null(), q) == 0.0);
  const double h = 1e-5;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (const auto* v : {&q, &cubic}) {
    for (int i = 0; i < 500; ++i) {
      const double mu = u(rng), n = u(rng);
      for (auto e : {SimpleExperiment::reveal_h(n), SimpleExperiment::reveal_l(n), SimpleExperiment::full()}) {
        const double fd = (gain_by_definition(e, mu + h, *v) - gain_by_definition(e, mu - h, *v)) / (2 * h);
        const double an = delta_v_mu(mu, e, *v);
        CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("delta_v_noise matches finite differences") {
  const auto v = ValueFunction::quadratic();
  const double h = 1e-6;
  for (double mu : {0.2, 0.5, 0.8}) {
    for (double n : {0.1, 0.4, 0.9}) {
      for (bool high : {true, false}) {
        auto make = [&](double x) { return high ? SimpleExperiment::reveal_h(x) : SimpleExperiment::reveal_l(x); };
        const double fd = (gain_by_definition(make(n + h), mu, v) - gain_by_definition(make(n - h), mu, v)) / (2 * h);
        CHECK(delta_v_noise(mu, make(n), v) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("value functions") {
  SUBCASE("smooth derivatives match finite differences") {
    const auto v = ValueFunction::polynomial({0.1, -0.3, 0.2, 0.5});
    for (double mu = 0.05; mu < 1.0; mu += 0.05) {
      const double h = 1e-5;
      CHECK(v.derivative(mu) == doctest::Approx((v(mu + h) - v(mu - h)) / (2 * h)).epsilon(1e-6));
      CHECK(v.second_derivative(mu) >= 0.0);
    }
  }
  SUBCASE("action tables") {
    const auto zero = ValueFunction::from_actions({{0.0, 0.0}});
    CHECK(zero(0.37) == 0.0);
    const auto kink = ValueFunction::from_actions({{0.0, 1.0}, {1.0, 0.0}});
    CHECK(kink(0.2) == doctest::Approx(0.8));
    CHECK(kink(0.7) == doctest::Approx(0.7));
    const auto sg = kink.subgradient(0.5);
    CHECK(sg.left == doctest::Approx(-1.0));
    CHECK(sg.right == doctest::Approx(1.0));
    CHECK_THROWS_AS(kink.derivative(0.3), UnsupportedKind);
  }
  SUBCASE("dense quadratic-loss table approximates the quadratic") {
    std::vector<Action> acts;
    for (int k = 0; k <= 100; ++k) {
      const double a = k / 100.0;
      acts.push_back({-a * a, -(1.0 - a) * (1.0 - a)});
    }
    const auto table = ValueFunction::from_actions(acts);
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double mu = i / 10000.0;
      worst = std::max(worst, std::abs(table(mu) - (mu * mu - mu)));
    }
    CHECK(worst <= 2.5e-5 + 1e-15);
  }
  SUBCASE("non-convex polynomial is rejected") {
    CHECK_THROWS_AS(ValueFunction::polynomial({0.0, 0.0, -1.0}), DomainError);
  }
}

TEST_CASE("belief densities integrate to one") {
  for (const auto& f : {BeliefDensity::uniform(), BeliefDensity::triangular(), BeliefDensity::tilted(0.3),
                        BeliefDensity::piecewise_linear({0.0, 0.3, 1.0}, {1.0, 3.0, 0.5})}) {
    double mass = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) mass += f.pdf((i + 0.5) / n) / n;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : {0.1, 0.5, 0.9}) CHECK(f.cdf(f.quantile(x)) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("concave hull") {
  const auto q = ValueFunction::quadratic();
  const auto hull_q = concave_hull(q, 257);
  for (double mu : {0.0, 0.3, 0.5, 0.9}) CHECK(std::abs(hull_q(mu)) < 1e-12);
  const auto lin = ValueFunction::polynomial({0.2, 0.5});
  const auto hull_l = concave_hull(lin, 65);
  for (double mu : {0.0, 0.3, 0.77}) CHECK(hull_l(mu) == doctest::Approx(lin(mu)).epsilon(1e-12));
  const auto table = ValueFunction::from_actions({{0.0, -1.0}, {-1.0 / 9, -4.0 / 9}, {-4.0 / 9, -1.0 / 9}, {-1.0, 0.0}});
  const auto hull_t = concave_hull(table, 301);
  for (double mu : {0.1, 0.5, 0.8}) {
    CHECK(hull_t(mu) == doctest::Approx(mu * table(1.0) + (1 - mu) * table(0.0)).epsilon(1e-12));
  }
}

TEST_CASE("buyer best contract") {
  const auto v = ValueFunction::quadratic();
  const MenuContract expensive[] = {{SimpleExperiment::full(), 0.3}};
  CHECK_FALSE(buyer_best_contract(expensive, 0.5, v).has_value());
  const MenuContract free_info[] = {{SimpleExperiment::full(), 0.0}};
  for (double mu : {0.0, 0.2, 0.9}) CHECK(buyer_best_contract(free_info, mu, v) == std::optional<std::size_t>(0));
  const MenuContract tie[] = {{SimpleExperiment::full(), 0.16}, {SimpleExperiment::null(), 0.0}};
  CHECK(buyer_best_contract(tie, 0.8, v) == std::optional<std::size_t>(1));
}

TEST_CASE("experiments") {
  const GeneralExperiment e({{0.5, 0.25}, {0.0, 0.0}, {0.25, 0.125}, {0.25, 0.625}});
  const auto c = e.canonical();
  CHECK(c.size() == 2);
  const auto s = as_simple(SimpleExperiment::reveal_h(0.4).to_general());
  REQUIRE(s.has_value());
  CHECK(s->orientation == Orientation::reveal_h);
  CHECK(s->noise == doctest::Approx(0.4));
  CHECK(SimpleExperiment::reveal_l(1.0).normalized() == SimpleExperiment::full());
  CHECK(SimpleExperiment::reveal_h(0.0).normalized() == SimpleExperiment::null());
  for (auto o : {Orientation::reveal_h, Orientation::reveal_l, Orientation::full, Orientation::null}) {
    CHECK(orientation_from_string(to_string(o)) == o);
  }
  CHECK_THROWS_AS(SimpleExperiment::reveal_h(1.5), DomainError);
  CHECK_THROWS_AS(require_belief(-0.1, "mu"), DomainError);
}

TEST_CASE("belief of type") {
  const double prior[] = {0.4, 0.6};
  SUBCASE("independent buyer signal") {
    // P(t_S = h | x) = 0.3, 0.8; buyer type independent of everything.
    std::vector<std::vector<std::vector<double>>> joint = {{{0.7 * 0.5, 0.7 * 0.5}, {0.3 * 0.5, 0.3 * 0.5}},
                                                           {{0.2 * 0.5, 0.2 * 0.5}, {0.8 * 0.5, 0.8 * 0.5}}};
    const auto r = belief_of_type(joint, prior);
    const double marginal = 0.4 * 0.3 + 0.6 * 0.8;
    REQUIRE(r.beliefs.size() == 2);
    for (const auto& b : r.beliefs) CHECK(b.belief == doctest::Approx(marginal).epsilon(1e-14));
  }
  SUBCASE("buyer sees the seller signal") {
    std::vector<std::vector<std::vector<double>>> joint = {{{0.7, 0.0}, {0.0, 0.3}}, {{0.2, 0.0}, {0.0, 0.8}}};
    const auto r = belief_of_type(joint, prior);
    REQUIRE(r.beliefs.size() == 2);
    CHECK(r.beliefs[0].belief == 0.0);
    CHECK(r.beliefs[1].belief == 1.0);
  }
  SUBCASE("binary symmetric channel") {
    const double half[] = {1.0};
    std::vector<std::vector<std::vector<double>>> joint = {{{0.5 * 0.75, 0.5 * 0.25}, {0.5 * 0.25, 0.5 * 0.75}}};
    const auto r = belief_of_type(joint, half);
    REQUIRE(r.beliefs.size() == 2);
    CHECK(r.beliefs[0].belief == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r.beliefs[1].belief == doctest::Approx(0.75).epsilon(1e-14));
  }
}
