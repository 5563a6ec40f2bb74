#include "infomenu/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "infomenu/errors.hpp"
#include "infomenu/numerics.hpp"

namespace infomenu {

namespace {

constexpr double kProbTol = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require_probability(double p, const char* what) {
  if (!(p >= -kProbTol && p <= 1.0 + kProbTol)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + fmt(p));
  }
}

}  // namespace

void require_belief(double mu, const char* what) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw DomainError(std::string(what) + " must be a belief in [0,1], got " + fmt(mu));
  }
}

// ---------------------------------------------------------------------------
// ValueFunction

ValueFunction ValueFunction::smooth(Fn value, Fn first, Fn second, std::string name) {
  ValueFunction v;
  v.kind_ = ValueKind::smooth;
  v.value_ = std::move(value);
  v.first_ = std::move(first);
  v.second_ = std::move(second);
  v.name_ = std::move(name);
  v.finalize();
  return v;
}

ValueFunction ValueFunction::quadratic(double scale) {
  if (!(scale >= 0.0)) throw DomainError("quadratic value scale must be >= 0 for convexity");
  auto v = smooth([scale](double m) { return scale * (m * m - m); },
                  [scale](double m) { return scale * (2.0 * m - 1.0); },
                  [scale](double) { return 2.0 * scale; }, "quadratic");
  v.coefficients_ = {0.0, -scale, scale};
  return v;
}

ValueFunction ValueFunction::polynomial(std::vector<double> c) {
  if (c.empty()) throw DomainError("polynomial value function needs at least one coefficient");
  auto horner = [](const std::vector<double>& k, double x) {
    double acc = 0.0;
    for (auto it = k.rbegin(); it != k.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  std::vector<double> d1, d2;
  for (std::size_t i = 1; i < c.size(); ++i) d1.push_back(static_cast<double>(i) * c[i]);
  for (std::size_t i = 1; i < d1.size(); ++i) d2.push_back(static_cast<double>(i) * d1[i]);
  auto v = smooth([c, horner](double m) { return horner(c, m); },
                  [d1, horner](double m) { return d1.empty() ? 0.0 : horner(d1, m); },
                  [d2, horner](double m) { return d2.empty() ? 0.0 : horner(d2, m); }, "polynomial");
  v.coefficients_ = std::move(c);
  for (int i = 0; i <= 512; ++i) {
    const double m = i / 512.0;
    if (v.second_derivative(m) < -1e-9) {
      throw DomainError("polynomial value function is not convex: V''(" + fmt(m) + ") = " +
                        fmt(v.second_derivative(m)));
    }
  }
  return v;
}

ValueFunction ValueFunction::from_actions(std::vector<Action> table) {
  if (table.empty()) throw DomainError("action table is empty");
  ValueFunction v;
  v.kind_ = ValueKind::action_table;
  v.actions_ = std::move(table);
  v.name_ = "actions";
  v.finalize();
  return v;
}

ValueFunction value_from_actions(std::vector<Action> table) {
  return ValueFunction::from_actions(std::move(table));
}

void ValueFunction::finalize() {
  symmetric_ = true;
  for (int i = 0; i <= 256; ++i) {
    const double m = i / 256.0;
    const double a = (*this)(m), b = (*this)(1.0 - m);
    if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) {
      symmetric_ = false;
      break;
    }
  }
}

double ValueFunction::operator()(double mu) const {
  if (kind_ == ValueKind::smooth) return value_(mu);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : actions_) best = std::max(best, mu * a.payoff_h + (1.0 - mu) * a.payoff_l);
  return best;
}

double ValueFunction::derivative(double mu) const {
  if (kind_ != ValueKind::smooth) {
    throw UnsupportedKind("V' is undefined at the kinks of an action-table value function");
  }
  return first_(mu);
}

double ValueFunction::second_derivative(double mu) const {
  if (kind_ != ValueKind::smooth) {
    throw UnsupportedKind("V'' is undefined for an action-table value function");
  }
  return second_(mu);
}

Subgradient ValueFunction::subgradient(double mu) const {
  if (kind_ == ValueKind::smooth) {
    const double d = first_(mu);
    return {d, d};
  }
  const double top = (*this)(mu);
  Subgradient g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& a : actions_) {
    const double val = mu * a.payoff_h + (1.0 - mu) * a.payoff_l;
    if (val >= top - 1e-12 * (1.0 + std::abs(top))) {
      const double slope = a.payoff_h - a.payoff_l;
      g.left = std::min(g.left, slope);
      g.right = std::max(g.right, slope);
    }
  }
  return g;
}

std::size_t ValueFunction::best_action(double mu) const {
  if (kind_ != ValueKind::action_table) throw UnsupportedKind("best_action needs an action table");
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const double val = mu * actions_[i].payoff_h + (1.0 - mu) * actions_[i].payoff_l;
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// BeliefDensity

BeliefDensity::BeliefDensity(Fn pdf, Fn cdf, Fn quantile, bool symmetric, std::string name)
    : pdf_(std::move(pdf)),
      cdf_(std::move(cdf)),
      quantile_(std::move(quantile)),
      symmetric_(symmetric),
      name_(std::move(name)) {}

double BeliefDensity::quantile(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (quantile_) return quantile_(x);
  auto root = numerics::bisect([&](double m) { return cdf_(m) - x; }, 0.0, 1.0, 1e-16,
                               "F(mu) = x");
  return root.x;
}

BeliefDensity BeliefDensity::uniform() {
  return piecewise_linear({0.0, 1.0}, {1.0, 1.0}, "uniform");
}

BeliefDensity BeliefDensity::triangular() {
  return piecewise_linear({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0}, "triangular");
}

BeliefDensity BeliefDensity::tilted(double slope) {
  if (!(std::abs(slope) < 2.0)) throw DomainError("tilted density needs |slope| < 2");
  return piecewise_linear({0.0, 1.0}, {1.0 - 0.5 * slope, 1.0 + 0.5 * slope}, "tilted");
}

BeliefDensity BeliefDensity::piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                              std::string name) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw DomainError("piecewise-linear density needs >= 2 knots with matching values");
  }
  if (knots.front() != 0.0 || knots.back() != 1.0) {
    throw DomainError("piecewise-linear density knots must span [0,1]");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (values[i] < 0.0) throw DomainError("density value at knot " + fmt(knots[i]) + " is negative");
    if (i > 0 && !(knots[i] > knots[i - 1])) throw DomainError("density knots must increase strictly");
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    mass += 0.5 * (knots[i] - knots[i - 1]) * (values[i] + values[i - 1]);
  }
  if (!(mass > 0.0)) throw DomainError("density has zero mass");
  for (auto& y : values) y /= mass;

  // Cumulative mass at each knot.
  std::vector<double> cum(knots.size(), 0.0);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * (knots[i] - knots[i - 1]) * (values[i] + values[i - 1]);
  }
  cum.back() = 1.0;

  bool sym = true;
  const std::size_t n = knots.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(knots[i] + knots[n - 1 - i] - 1.0) > 1e-12 ||
        std::abs(values[i] - values[n - 1 - i]) > 1e-12) {
      sym = false;
      break;
    }
  }

  auto segment = [knots](double m) {
    auto it = std::upper_bound(knots.begin(), knots.end(), m);
    std::size_t i = static_cast<std::size_t>(std::distance(knots.begin(), it));
    return std::clamp<std::size_t>(i, 1, knots.size() - 1) - 1;
  };
  auto pdf = [knots, values, segment](double m) {
    if (m < 0.0 || m > 1.0) return 0.0;
    const std::size_t i = segment(m);
    const double w = (m - knots[i]) / (knots[i + 1] - knots[i]);
    return values[i] + w * (values[i + 1] - values[i]);
  };
  auto cdf = [knots, values, cum, segment](double m) {
    if (m <= 0.0) return 0.0;
    if (m >= 1.0) return 1.0;
    const std::size_t i = segment(m);
    const double d = m - knots[i];
    const double s = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
    return std::min(1.0, cum[i] + values[i] * d + 0.5 * s * d * d);
  };
  auto quantile = [knots, values, cum](double u) {
    std::size_t i = 0;
    while (i + 2 < knots.size() && cum[i + 1] < u) ++i;
    const double r = u - cum[i];
    const double len = knots[i + 1] - knots[i];
    const double y0 = values[i];
    const double s = (values[i + 1] - values[i]) / len;
    const double disc = std::max(0.0, y0 * y0 + 2.0 * s * r);
    const double denom = y0 + std::sqrt(disc);
    double d = denom > 0.0 ? 2.0 * r / denom : 0.0;
    d = std::clamp(d, 0.0, len);
    // One Newton polish on F(x) - u.
    const double f = y0 + s * d;
    if (f > 0.0) d = std::clamp(d - (y0 * d + 0.5 * s * d * d - r) / f, 0.0, len);
    return knots[i] + d;
  };
  return BeliefDensity(pdf, cdf, quantile, sym, std::move(name));
}

// ---------------------------------------------------------------------------
// Experiments

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::reveal_h: return "reveal_h";
    case Orientation::reveal_l: return "reveal_l";
    case Orientation::full: return "full";
    case Orientation::null: return "null";
  }
  return "?";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "reveal_h") return Orientation::reveal_h;
  if (s == "reveal_l") return Orientation::reveal_l;
  if (s == "full") return Orientation::full;
  if (s == "null") return Orientation::null;
  throw DomainError("unknown orientation '" + s + "'");
}

GeneralExperiment::GeneralExperiment(std::vector<Signal> signals) : signals_(std::move(signals)) {
  if (signals_.empty()) throw DomainError("experiment needs at least one signal");
  double sum_h = 0.0, sum_l = 0.0;
  for (std::size_t i = 0; i < signals_.size(); ++i) {
    require_probability(signals_[i].given_h, "g(s|h)");
    require_probability(signals_[i].given_l, "g(s|l)");
    sum_h += signals_[i].given_h;
    sum_l += signals_[i].given_l;
  }
  if (std::abs(sum_h - 1.0) > kProbTol || std::abs(sum_l - 1.0) > kProbTol) {
    throw DomainError("experiment likelihoods must sum to 1 in each state (h: " + fmt(sum_h) +
                      ", l: " + fmt(sum_l) + ")");
  }
}

GeneralExperiment GeneralExperiment::canonical() const {
  std::vector<Signal> out;
  for (const auto& s : signals_) {
    if (s.given_h <= kProbTol && s.given_l <= kProbTol) continue;
    bool merged = false;
    for (auto& o : out) {
      if (std::abs(o.given_h * s.given_l - o.given_l * s.given_h) <= kProbTol) {
        o.given_h += s.given_h;
        o.given_l += s.given_l;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const Signal& a, const Signal& b) {
    return a.given_h * b.given_l < b.given_h * a.given_l;  // ascending likelihood ratio
  });
  GeneralExperiment e;
  e.signals_ = std::move(out);
  return e;
}

SimpleExperiment SimpleExperiment::reveal_h(double p) {
  require_probability(p, "reveal-h noise p");
  return {Orientation::reveal_h, clamp01(p)};
}

SimpleExperiment SimpleExperiment::reveal_l(double q) {
  require_probability(q, "reveal-l noise q");
  return {Orientation::reveal_l, clamp01(q)};
}

GeneralExperiment SimpleExperiment::to_general() const {
  switch (orientation) {
    case Orientation::reveal_h: return GeneralExperiment({{noise, 0.0}, {1.0 - noise, 1.0}});
    case Orientation::reveal_l: return GeneralExperiment({{0.0, noise}, {1.0, 1.0 - noise}});
    case Orientation::full: return GeneralExperiment({{1.0, 0.0}, {0.0, 1.0}});
    case Orientation::null: return GeneralExperiment({{1.0, 1.0}});
  }
  return GeneralExperiment({{1.0, 1.0}});
}

SimpleExperiment SimpleExperiment::normalized() const {
  if (orientation == Orientation::reveal_h || orientation == Orientation::reveal_l) {
    if (noise >= 1.0) return full();
    if (noise <= 0.0) return null();
  }
  return *this;
}

std::optional<SimpleExperiment> as_simple(const GeneralExperiment& e) {
  const auto c = e.canonical();
  const auto s = c.signals();
  if (s.size() == 1) return SimpleExperiment::null();
  if (s.size() != 2) return std::nullopt;
  // s[0] has the lowest likelihood ratio g(.|h)/g(.|l).
  const bool low_conclusive = s[0].given_h <= kProbTol;
  const bool high_conclusive = s[1].given_l <= kProbTol;
  if (low_conclusive && high_conclusive) return SimpleExperiment::full();
  if (low_conclusive) return SimpleExperiment::reveal_l(s[0].given_l);
  if (high_conclusive) return SimpleExperiment::reveal_h(s[1].given_h);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bayes and values

double signal_probability(const Signal& s, double prior) {
  return s.given_h * prior + s.given_l * (1.0 - prior);
}

double posterior(const GeneralExperiment& e, std::size_t signal, double prior) {
  require_belief(prior, "prior");
  if (signal >= e.size()) throw DomainError("signal index " + std::to_string(signal) + " out of range");
  const auto& s = e.signals()[signal];
  const double prob = signal_probability(s, prior);
  if (!(prob > 0.0)) {
    throw DomainError("signal " + std::to_string(signal) + " has zero probability at prior " + fmt(prior));
  }
  return clamp01(s.given_h * prior / prob);
}

double posterior(const SimpleExperiment& e, std::size_t signal, double prior) {
  return posterior(e.to_general(), signal, prior);
}

double experiment_value(const GeneralExperiment& e, double mu, const ValueFunction& v) {
  require_belief(mu, "prior");
  double total = 0.0;
  for (const auto& s : e.signals()) {
    const double prob = signal_probability(s, mu);
    if (prob > 0.0) total += prob * v(clamp01(s.given_h * mu / prob));
  }
  return total;
}

double experiment_value(const SimpleExperiment& e, double mu, const ValueFunction& v) {
  return experiment_value(e.to_general(), mu, v);
}

double delta_v(double mu, const SimpleExperiment& e, const ValueFunction& v) {
  require_belief(mu, "prior");
  switch (e.orientation) {
    case Orientation::null: return 0.0;
    case Orientation::full: return mu * v(1.0) + (1.0 - mu) * v(0.0) - v(mu);
    case Orientation::reveal_l: {
      const double q = e.noise;
      const double mass = mu + (1.0 - q) * (1.0 - mu);
      const double noisy = mass > 0.0 ? mass * v(clamp01(mu / mass)) : 0.0;
      return q * (1.0 - mu) * v(0.0) + noisy - v(mu);
    }
    case Orientation::reveal_h: {
      const double p = e.noise;
      const double mass = mu * (1.0 - p) + 1.0 - mu;
      const double noisy = mass > 0.0 ? mass * v(clamp01((1.0 - p) * mu / mass)) : 0.0;
      return p * mu * v(1.0) + noisy - v(mu);
    }
  }
  return 0.0;
}

double delta_v_mu(double mu, const SimpleExperiment& e, const ValueFunction& v) {
  if (v.kind() != ValueKind::smooth) {
    throw UnsupportedKind("dDeltaV/dmu needs a C2 value function; action tables have kinks");
  }
  require_belief(mu, "prior");
  const double dv_mu = v.derivative(mu);
  switch (e.orientation) {
    case Orientation::null: return 0.0;
    case Orientation::full: return v(1.0) - v(0.0) - dv_mu;
    case Orientation::reveal_l: {
      const double q = e.noise;
      const double mass = 1.0 - q + q * mu;
      if (!(mass > 0.0)) return v(1.0) - v(0.0) - dv_mu;
      const double nu = clamp01(mu / mass);
      return q * (v(nu) - v(0.0)) + v.derivative(nu) * (1.0 - q) / mass - dv_mu;
    }
    case Orientation::reveal_h: {
      const double p = e.noise;
      const double mass = 1.0 - p * mu;
      if (!(mass > 0.0)) return v(1.0) - v(0.0) - dv_mu;
      const double nu = clamp01((1.0 - p) * mu / mass);
      return p * (v(1.0) - v(nu)) + v.derivative(nu) * (1.0 - p) / mass - dv_mu;
    }
  }
  return 0.0;
}

double delta_v_noise(double mu, const SimpleExperiment& e, const ValueFunction& v) {
  if (v.kind() != ValueKind::smooth) throw UnsupportedKind("dDeltaV/dnoise needs a C2 value function");
  require_belief(mu, "prior");
  switch (e.orientation) {
    case Orientation::reveal_l: {
      const double mass = 1.0 - e.noise * (1.0 - mu);
      if (!(mass > 0.0)) return 0.0;
      const double nu = clamp01(mu / mass);
      return -(1.0 - mu) * (v(nu) - v(0.0) - nu * v.derivative(nu));
    }
    case Orientation::reveal_h: {
      const double mass = 1.0 - e.noise * mu;
      if (!(mass > 0.0)) return 0.0;
      const double nu = clamp01((1.0 - e.noise) * mu / mass);
      return -mu * (v(nu) - v(1.0) + (1.0 - nu) * v.derivative(nu));
    }
    default: return 0.0;
  }
}

// ---------------------------------------------------------------------------
// Concave hull

ConcaveHull::ConcaveHull(const ValueFunction& v, std::size_t grid_size) {
  if (grid_size < 3) throw DomainError("concave hull needs grid_size >= 3");
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double y = v(x);
    // Monotone chain, upper hull: pop while the last turn is not clockwise.
    while (xs_.size() >= 2) {
      const std::size_t k = xs_.size();
      const double cross = (xs_[k - 1] - xs_[k - 2]) * (y - ys_[k - 2]) -
                           (ys_[k - 1] - ys_[k - 2]) * (x - xs_[k - 2]);
      if (cross >= 0.0) {
        xs_.pop_back();
        ys_.pop_back();
      } else {
        break;
      }
    }
    xs_.push_back(x);
    ys_.push_back(y);
  }
}

double ConcaveHull::operator()(double mu) const {
  require_belief(mu, "hull argument");
  auto it = std::upper_bound(xs_.begin(), xs_.end(), mu);
  std::size_t i = static_cast<std::size_t>(std::distance(xs_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, xs_.size() - 1);
  const double w = (mu - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
}

ConcaveHull concave_hull(const ValueFunction& v, std::size_t grid_size) { return ConcaveHull(v, grid_size); }

// ---------------------------------------------------------------------------
// Buyer choice

std::optional<std::size_t> buyer_best_contract(std::span<const MenuContract> menu, double mu,
                                               const ValueFunction& v) {
  constexpr double kTie = 1e-12;
  std::optional<std::size_t> best;
  double best_net = v(mu);
  double best_price = 0.0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const double net = experiment_value(menu[i].experiment, mu, v) - menu[i].price;
    bool take = false;
    if (net > best_net + kTie) {
      take = true;
    } else if (net >= best_net - kTie) {
      if (menu[i].price < best_price) take = true;
      else if (menu[i].price == best_price && !best) take = true;
    }
    if (take) {
      best = i;
      best_net = net;
      best_price = menu[i].price;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Type reduction

BeliefReduction belief_of_type(const std::vector<std::vector<std::vector<double>>>& joint,
                               std::span<const double> prior_x) {
  if (joint.size() != prior_x.size() || joint.empty()) {
    throw DomainError("joint table and state prior must have the same nonzero length");
  }
  double prior_sum = 0.0;
  for (double p : prior_x) prior_sum += p;
  if (std::abs(prior_sum - 1.0) > 1e-9) throw DomainError("state prior must sum to 1");
  std::size_t n_b = 0;
  for (std::size_t x = 0; x < joint.size(); ++x) {
    if (joint[x].size() != 2) throw DomainError("seller signal must be binary (rows l, h)");
    if (x == 0) n_b = joint[x][0].size();
    double total = 0.0;
    for (const auto& row : joint[x]) {
      if (row.size() != n_b) throw DomainError("inconsistent number of buyer types");
      for (double p : row) total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw DomainError("pi(t_S, t_B | x) must sum to 1 for state " + std::to_string(x));
    }
  }
  BeliefReduction out;
  for (std::size_t b = 0; b < n_b; ++b) {
    double p_h = 0.0, p_l = 0.0;
    for (std::size_t x = 0; x < joint.size(); ++x) {
      p_l += prior_x[x] * joint[x][0][b];
      p_h += prior_x[x] * joint[x][1][b];
    }
    const double total = p_h + p_l;
    if (!(total > 1e-15)) {
      out.warnings.push_back("buyer type " + std::to_string(b) + " has zero probability; excluded");
      continue;
    }
    out.beliefs.push_back({b, p_h / total, total});
  }
  return out;
}

}  // namespace infomenu
