#pragma once

// Beliefs, value functions, belief densities and Blackwell experiments over a
// binary seller signal {l, h}. A belief is the probability that the seller's
// signal is h and is carried as a plain double in [0, 1].

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace infomenu {

void require_belief(double mu, const char* what);

// ---------------------------------------------------------------------------
// Value functions
// ---------------------------------------------------------------------------

enum class ValueKind { smooth, action_table };

// Payoffs of one action in utility units.
struct Action {
  double payoff_l = 0.0;
  double payoff_h = 0.0;
};

// One-sided slopes of a convex function at a point.
struct Subgradient {
  double left = 0.0;
  double right = 0.0;
};

// V(mu): the buyer's best expected payoff at belief mu. Either a C2 function
// supplied with analytic V' and V'' (smooth kind), or the upper envelope of a
// finite action table (piecewise linear, convex).
class ValueFunction {
 public:
  using Fn = std::function<double(double)>;

  static ValueFunction smooth(Fn value, Fn first, Fn second, std::string name);
  // scale * (mu^2 - mu): the value of quadratic-loss estimation of the state.
  static ValueFunction quadratic(double scale = 1.0);
  // sum_k c_k mu^k, coefficients in ascending powers. Must be convex on [0,1].
  static ValueFunction polynomial(std::vector<double> coefficients);
  static ValueFunction from_actions(std::vector<Action> table);

  ValueKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool symmetric() const noexcept { return symmetric_; }

  double operator()(double mu) const;
  // Smooth kind only; action tables throw UnsupportedKind.
  double derivative(double mu) const;
  double second_derivative(double mu) const;
  Subgradient subgradient(double mu) const;

  // Action-table kind only. Ties go to the lower action index.
  std::size_t best_action(double mu) const;
  const std::vector<Action>& actions() const noexcept { return actions_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

 private:
  ValueFunction() = default;
  void finalize();

  ValueKind kind_ = ValueKind::smooth;
  std::string name_;
  bool symmetric_ = false;
  Fn value_, first_, second_;
  std::vector<Action> actions_;
  std::vector<double> coefficients_;
};

ValueFunction value_from_actions(std::vector<Action> table);

// ---------------------------------------------------------------------------
// Belief densities
// ---------------------------------------------------------------------------

// Density of the buyer's private belief on [0,1] with CDF and quantile.
class BeliefDensity {
 public:
  using Fn = std::function<double(double)>;

  // Quantile may be empty; it is then computed by bisection on the CDF.
  BeliefDensity(Fn pdf, Fn cdf, Fn quantile, bool symmetric, std::string name);

  static BeliefDensity uniform();
  // Symmetric triangle with peak at 0.5.
  static BeliefDensity triangular();
  // Density proportional to 1 + slope * (mu - 0.5); |slope| < 2.
  static BeliefDensity tilted(double slope);
  // Piecewise-linear density through (knots, values), normalized to unit mass.
  // Knots must start at 0, end at 1 and increase strictly.
  static BeliefDensity piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                        std::string name = "tabulated");

  double pdf(double mu) const { return pdf_(mu); }
  double cdf(double mu) const { return cdf_(mu); }
  double quantile(double x) const;
  bool symmetric() const noexcept { return symmetric_; }
  const std::string& name() const noexcept { return name_; }

 private:
  Fn pdf_, cdf_, quantile_;
  bool symmetric_ = false;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class Orientation { reveal_h, reveal_l, full, null };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// Likelihood pair of one signal.
struct Signal {
  double given_h = 0.0;
  double given_l = 0.0;
};

// Arbitrary finite experiment of the binary seller signal.
class GeneralExperiment {
 public:
  GeneralExperiment() = default;
  explicit GeneralExperiment(std::vector<Signal> signals);

  std::span<const Signal> signals() const noexcept { return signals_; }
  std::size_t size() const noexcept { return signals_.size(); }

  // Drops zero signals, merges signals with proportional likelihoods (they
  // induce the same posterior at every prior) and sorts by likelihood ratio.
  // Two experiments with equal canonical forms are value-equivalent.
  GeneralExperiment canonical() const;
  bool operator==(const GeneralExperiment& other) const = default;

 private:
  std::vector<Signal> signals_;
};

// Two-signal experiment with one conclusive signal.
//  reveal_h(p): state h emits the conclusive h-signal with probability p,
//               otherwise the noisy signal; state l always the noisy signal.
//  reveal_l(q): state l emits the conclusive l-signal with probability q.
//  full / null: noise fixed at 1 / 0.
// Signal indices: 0 = conclusive, 1 = noisy (full: 0 = h-signal, 1 = l-signal;
// null has the single signal 0).
struct SimpleExperiment {
  Orientation orientation = Orientation::null;
  double noise = 0.0;

  static SimpleExperiment reveal_h(double p);
  static SimpleExperiment reveal_l(double q);
  static SimpleExperiment full() { return {Orientation::full, 1.0}; }
  static SimpleExperiment null() { return {Orientation::null, 0.0}; }

  GeneralExperiment to_general() const;
  // Collapses noise 1 to full and noise 0 to null.
  SimpleExperiment normalized() const;
  bool operator==(const SimpleExperiment&) const = default;
};

// Recognizes a simple (or full/null) experiment from its canonical form.
std::optional<SimpleExperiment> as_simple(const GeneralExperiment& e);

struct MenuContract {
  SimpleExperiment experiment;
  double price = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double signal_probability(const Signal& s, double prior);
double posterior(const GeneralExperiment& e, std::size_t signal, double prior);
double posterior(const SimpleExperiment& e, std::size_t signal, double prior);

// U(e, mu) = E_s[V(posterior)].
double experiment_value(const GeneralExperiment& e, double mu, const ValueFunction& v);
double experiment_value(const SimpleExperiment& e, double mu, const ValueFunction& v);

// Buyer surplus from the experiment, U(e, mu) - V(mu), via the two-branch
// closed form for reveal-h / reveal-l experiments.
double delta_v(double mu, const SimpleExperiment& e, const ValueFunction& v);
// Partial derivative of delta_v in mu with the experiment held fixed.
double delta_v_mu(double mu, const SimpleExperiment& e, const ValueFunction& v);
// Partial derivative of delta_v in the noise parameter at fixed mu.
double delta_v_noise(double mu, const SimpleExperiment& e, const ValueFunction& v);

// Upper concave hull of V sampled on a uniform grid, linearly interpolated.
class ConcaveHull {
 public:
  ConcaveHull(const ValueFunction& v, std::size_t grid_size);
  double operator()(double mu) const;
  std::span<const double> vertices_x() const noexcept { return xs_; }

 private:
  std::vector<double> xs_, ys_;
};

ConcaveHull concave_hull(const ValueFunction& v, std::size_t grid_size);

// Index into `menu`, or nullopt for the outside option. Among equal net
// utilities (within 1e-12) the lower price wins, then the lower index; the
// outside option loses ties with any contract of equal price.
std::optional<std::size_t> buyer_best_contract(std::span<const MenuContract> menu, double mu,
                                               const ValueFunction& v);

// Reduction of a correlated-signal model to buyer beliefs.
// joint[x][t_s][t_b] = pi(t_s, t_b | x) with t_s in {0 = l, 1 = h}.
struct TypeBelief {
  std::size_t buyer_type = 0;
  double belief = 0.0;
  double probability = 0.0;
};
struct BeliefReduction {
  std::vector<TypeBelief> beliefs;
  std::vector<std::string> warnings;
};
BeliefReduction belief_of_type(const std::vector<std::vector<std::vector<double>>>& joint,
                               std::span<const double> prior_x);

}  // namespace infomenu
