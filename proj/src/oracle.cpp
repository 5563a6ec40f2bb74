#include "infomenu/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "infomenu/errors.hpp"

namespace infomenu {

namespace {

constexpr double kTie = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_experiment(const GeneralExperiment& a, const GeneralExperiment& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.signals()[i].given_h - b.signals()[i].given_h) > 1e-12 ||
        std::abs(a.signals()[i].given_l - b.signals()[i].given_l) > 1e-12) {
      return false;
    }
  }
  return true;
}

bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// True when (rev, a) beats (best_rev, best): higher revenue, or equal revenue
// and lexicographically smaller assignment.
bool better(double rev, const std::vector<std::size_t>& a, double best_rev, const std::vector<std::size_t>& best) {
  if (rev > best_rev + kTie) return true;
  if (rev < best_rev - kTie) return false;
  return best.empty() || lex_less(a, best);
}

}  // namespace

DiscreteInstance make_instance(std::vector<DiscreteType> types, std::vector<GeneralExperiment> catalog,
                               const ValueFunction& v) {
  if (types.empty()) throw DomainError("instance needs at least one type");
  double total = 0.0;
  for (const auto& t : types) {
    require_belief(t.belief, "type belief");
    if (!(t.weight >= 0.0)) throw DomainError("type weights must be non-negative");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("type weights must sum to 1");

  std::vector<GeneralExperiment> cat;
  cat.push_back(SimpleExperiment::null().to_general().canonical());
  cat.push_back(SimpleExperiment::full().to_general().canonical());
  for (const auto& e : catalog) {
    auto c = e.canonical();
    if (std::none_of(cat.begin(), cat.end(), [&](const GeneralExperiment& x) { return same_experiment(x, c); })) {
      cat.push_back(std::move(c));
    }
  }
  DiscreteInstance inst{std::move(types), std::move(cat), v, {}, {}, 1};
  inst.utility.assign(inst.types.size(), std::vector<double>(inst.catalog.size()));
  inst.outside.resize(inst.types.size());
  for (std::size_t j = 0; j < inst.types.size(); ++j) {
    const double mu = inst.types[j].belief;
    inst.outside[j] = v(mu);
    for (std::size_t c = 0; c < inst.catalog.size(); ++c) {
      inst.utility[j][c] = c == 0 ? inst.outside[j] : experiment_value(inst.catalog[c], mu, v);
    }
  }
  return inst;
}

std::vector<DiscreteType> uniform_types(std::size_t n, double lo, double hi) {
  if (n == 0) throw DomainError("need at least one type");
  std::vector<DiscreteType> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].belief = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out[i].weight = 1.0 / static_cast<double>(n);
  }
  return out;
}

std::vector<GeneralExperiment> simple_catalog(double step) {
  if (!(step > 0.0 && step < 1.0)) throw DomainError("noise step must lie in (0,1)");
  std::vector<GeneralExperiment> out{SimpleExperiment::null().to_general(), SimpleExperiment::full().to_general()};
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  for (std::size_t k = 1; k < n; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x >= 1.0 - 1e-12) break;
    out.push_back(SimpleExperiment::reveal_h(x).to_general());
    out.push_back(SimpleExperiment::reveal_l(x).to_general());
  }
  return out;
}

std::vector<GeneralExperiment> likelihood_grid_catalog(double step) {
  const auto n = static_cast<int>(std::llround(1.0 / step));
  if (n < 1 || std::abs(n * step - 1.0) > 1e-12) throw DomainError("likelihood step must divide 1");
  std::vector<std::vector<int>> splits;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; a + b <= n; ++b) splits.push_back({a, b, n - a - b});
  }
  std::vector<GeneralExperiment> out;
  for (const auto& h : splits) {
    for (const auto& l : splits) {
      std::vector<Signal> s;
      for (int i = 0; i < 3; ++i) s.push_back({h[i] / static_cast<double>(n), l[i] / static_cast<double>(n)});
      auto c = GeneralExperiment(std::move(s)).canonical();
      if (std::none_of(out.begin(), out.end(), [&](const GeneralExperiment& x) { return same_experiment(x, c); })) {
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prices for a fixed assignment

PriceResult best_prices_for_assignment(const DiscreteInstance& inst, std::span<const std::size_t> assignment) {
  const std::size_t n = inst.types.size();
  if (assignment.size() != n) throw DomainError("assignment must cover every type");
  PriceResult res;
  for (auto a : assignment) {
    if (a >= inst.catalog.size()) throw DomainError("assignment index outside the catalog");
  }
  // Node n is the IR root. d[i][j]: shortest path i -> j; price_j <= d[root][j].
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(n + 1, kInf));
  for (std::size_t i = 0; i <= n; ++i) d[i][i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double own = inst.utility[i][assignment[i]];
    d[n][i] = own - inst.outside[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) d[j][i] = std::min(d[j][i], own - inst.utility[i][assignment[j]]);
    }
  }
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i <= n; ++i) {
      if (d[i][k] == kInf) continue;
      for (std::size_t j = 0; j <= n; ++j) {
        const double via = d[i][k] + d[k][j];
        if (via < d[i][j]) d[i][j] = via;
      }
    }
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (d[i][i] < -kTie) {
      res.reason = "negative cycle in the incentive constraints";
      return res;
    }
  }
  res.prices.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = d[n][i];
    if (p < -kTie) {
      res.prices.clear();
      res.reason = "type " + std::to_string(i) + " would need a negative price";
      return res;
    }
    p = std::max(p, 0.0);
    res.prices[i] = p;
    res.revenue += inst.types[i].weight * p;
  }
  res.feasible = true;
  return res;
}

// ---------------------------------------------------------------------------
// Local search

namespace {

double evaluate(const DiscreteInstance& inst, const std::vector<std::size_t>& a) {
  const auto r = best_prices_for_assignment(inst, a);
  return r.feasible ? r.revenue : -kInf;
}

// Nulls non-null types (highest index first) until the assignment is feasible.
void repair(const DiscreteInstance& inst, std::vector<std::size_t>& a) {
  while (evaluate(inst, a) == -kInf) {
    bool changed = false;
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] != 0) {
        a[i] = 0;
        changed = true;
        break;
      }
    }
    if (!changed) return;
  }
}

void improve(const DiscreteInstance& inst, std::vector<std::size_t>& a, double& rev) {
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t keep = a[i];
      for (std::size_t c = 0; c < inst.catalog.size(); ++c) {
        if (c == keep) continue;
        a[i] = c;
        const double r = evaluate(inst, a);
        if (r > rev + kTie) {
          rev = r;
          improved = true;
          break;
        }
        a[i] = keep;
      }
    }
  }
}

}  // namespace

DiscreteMechanism local_search(const DiscreteInstance& inst, const OracleOptions& opts) {
  const std::size_t n = inst.types.size();
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, inst.catalog.size() - 1);
  std::vector<std::size_t> best;
  double best_rev = -kInf;
  auto consider = [&](std::vector<std::size_t> a) {
    repair(inst, a);
    double rev = evaluate(inst, a);
    improve(inst, a, rev);
    if (better(rev, a, best_rev, best)) {
      best_rev = rev;
      best = a;
    }
  };
  if (opts.incumbent && opts.incumbent->size() == n) consider(*opts.incumbent);
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    std::vector<std::size_t> a(n, 0);
    if (r == 1) {
      std::fill(a.begin(), a.end(), inst.full_index);
    } else if (r > 1) {
      for (auto& x : a) x = pick(rng);
    }
    consider(std::move(a));
  }
  DiscreteMechanism m;
  m.assignment = best;
  const auto pr = best_prices_for_assignment(inst, best);
  m.prices = pr.prices;
  m.revenue = pr.revenue;
  m.mode = "local_search";
  return m;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const DiscreteInstance& inst, std::uint64_t budget)
      : inst_(inst), n_(inst.types.size()), budget_(budget), assign_(n_, 0), dist_(n_ + 1) {
    // dist_[k] is the shortest-path matrix over the root and types 0..k-1.
    for (std::size_t k = 0; k <= n_; ++k) dist_[k].assign((n_ + 1) * (n_ + 1), kInf);
    candidates_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) candidates_[j] = undominated(j);
    max_utility_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      max_utility_[j] = *std::max_element(inst.utility[j].begin(), inst.utility[j].end());
    }
  }

  // Contract c' is dropped for type j when some c gives j strictly more extra
  // utility than it gives any other type: swapping c' for c and raising j's
  // price by that amount keeps every constraint and strictly raises revenue.
  std::vector<std::size_t> undominated(std::size_t j) const {
    const auto& u = inst_.utility;
    const std::size_t m = inst_.catalog.size();
    std::vector<std::size_t> keep;
    for (std::size_t cp = 0; cp < m; ++cp) {
      bool dominated = false;
      for (std::size_t c = 0; c < m && !dominated && inst_.types[j].weight > 0.0; ++c) {
        const double delta = u[j][c] - u[j][cp];
        if (!(delta > kTie)) continue;
        bool ok = true;
        for (std::size_t k = 0; k < n_ && ok; ++k) {
          if (k != j && u[k][c] - u[k][cp] > delta) ok = false;
        }
        dominated = ok;
      }
      if (!dominated) keep.push_back(cp);
    }
    return keep;
  }

  void seed(const std::vector<std::size_t>& a, double rev) {
    best_ = a;
    best_rev_ = rev;
  }

  bool run() {
    at(0, n_, n_) = 0.0;
    dfs(0);
    return !exhausted_;
  }

  const std::vector<std::size_t>& best() const { return best_; }
  double best_revenue() const { return best_rev_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  // Node index: types are 0..n-1, root is n.
  double& at(std::size_t level, std::size_t i, std::size_t j) { return dist_[level][i * (n_ + 1) + j]; }

  // Extends the matrix at `level` (types 0..level-1 assigned) with type
  // `level`. Returns false on a negative cycle or negative price.
  bool extend(std::size_t level) {
    const std::size_t k = level;
    const std::size_t root = n_;
    auto& prev = dist_[level];
    auto& next = dist_[level + 1];
    next = prev;
    const double own = inst_.utility[k][assign_[k]];
    // Arcs into k: root -> k and i -> k; arcs out of k: k -> i.
    std::vector<double> in(n_ + 1, kInf), out(n_ + 1, kInf);
    auto nodes = [&](auto&& fn) {
      for (std::size_t i = 0; i < level; ++i) fn(i);
      fn(root);
    };
    nodes([&](std::size_t x) {
      double best = prev[x * (n_ + 1) + root] + (own - inst_.outside[k]);
      for (std::size_t i = 0; i < level; ++i) {
        const double dxi = prev[x * (n_ + 1) + i];
        if (dxi == kInf) continue;
        best = std::min(best, dxi + own - inst_.utility[k][assign_[i]]);
      }
      in[x] = best;
    });
    nodes([&](std::size_t y) {
      double best = kInf;
      for (std::size_t i = 0; i < level; ++i) {
        const double w = inst_.utility[i][assign_[i]] - inst_.utility[i][assign_[k]];
        const double diy = prev[i * (n_ + 1) + y];
        if (diy == kInf) continue;
        best = std::min(best, w + diy);
      }
      out[y] = best;
    });
    double cycle = kInf;
    for (std::size_t i = 0; i < level; ++i) {
      const double w = inst_.utility[i][assign_[i]] - inst_.utility[i][assign_[k]];
      cycle = std::min(cycle, w + in[i]);
    }
    if (cycle < -kTie) return false;
    next[k * (n_ + 1) + k] = 0.0;
    nodes([&](std::size_t x) {
      next[x * (n_ + 1) + k] = in[x];
      next[k * (n_ + 1) + x] = out[x];
    });
    nodes([&](std::size_t x) {
      if (in[x] == kInf) return;
      nodes([&](std::size_t y) {
        const double via = in[x] + out[y];
        double& cur = next[x * (n_ + 1) + y];
        if (via < cur) cur = via;
      });
    });
    for (std::size_t i = 0; i <= level; ++i) {
      if (next[root * (n_ + 1) + i] < -kTie) return false;
      if (next[i * (n_ + 1) + i] < -kTie) return false;
    }
    return true;
  }

  // Upper bound on revenue of any completion of types 0..level-1.
  double bound(std::size_t level) const {
    const auto& d = dist_[level];
    const std::size_t root = n_;
    double total = 0.0;
    for (std::size_t i = 0; i < level; ++i) total += inst_.types[i].weight * std::max(0.0, d[root * (n_ + 1) + i]);
    for (std::size_t j = level; j < n_; ++j) {
      double k = kInf;
      for (std::size_t i = 0; i < level; ++i) {
        k = std::min(k, d[root * (n_ + 1) + i] - inst_.utility[j][assign_[i]]);
      }
      // max_c min(U_j(c) - V_j, k + U_j(c)) = max_c U_j(c) + min(-V_j, k).
      const double best = std::max(0.0, max_utility_[j] + std::min(-inst_.outside[j], k));
      total += inst_.types[j].weight * best;
    }
    return total;
  }

  bool prefix_after_best(std::size_t level) const {
    if (best_.empty()) return false;
    for (std::size_t i = 0; i <= level; ++i) {
      if (assign_[i] != best_[i]) return assign_[i] > best_[i];
    }
    return false;
  }

  void dfs(std::size_t level) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (level == n_) {
      double rev = 0.0;
      const auto& d = dist_[n_];
      for (std::size_t i = 0; i < n_; ++i) rev += inst_.types[i].weight * std::max(0.0, d[n_ * (n_ + 1) + i]);
      if (better(rev, assign_, best_rev_, best_)) {
        best_rev_ = rev;
        best_ = assign_;
      }
      return;
    }
    for (std::size_t c : candidates_[level]) {
      assign_[level] = c;
      if (!extend(level)) continue;
      const double b = bound(level + 1);
      if (b < best_rev_ - kTie) continue;
      // A prefix already past the incumbent's can only win on revenue.
      if (b <= best_rev_ + kTie && prefix_after_best(level)) continue;
      dfs(level + 1);
      if (exhausted_) return;
    }
    assign_[level] = 0;
  }

  const DiscreteInstance& inst_;
  std::size_t n_;
  std::uint64_t budget_;
  std::vector<std::size_t> assign_;
  std::vector<std::vector<double>> dist_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<double> max_utility_;
  std::vector<std::size_t> best_;
  double best_rev_ = -kInf;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

DiscreteMechanism brute_force_optimal(const DiscreteInstance& inst, const OracleOptions& opts) {
  OracleOptions seed_opts = opts;
  seed_opts.restarts = std::min<std::size_t>(opts.restarts, 4);
  const DiscreteMechanism seed = local_search(inst, seed_opts);

  BranchAndBound bb(inst, opts.budget);
  bb.seed(seed.assignment, seed.revenue);
  const bool complete = bb.run();
  DiscreteMechanism m;
  if (complete) {
    m.assignment = bb.best();
    m.exhaustive = true;
    m.mode = "exhaustive";
  } else {
    OracleOptions full = opts;
    full.incumbent = bb.best();
    m = local_search(inst, full);
  }
  m.nodes = bb.nodes();
  const auto pr = best_prices_for_assignment(inst, m.assignment);
  m.prices = pr.prices;
  m.revenue = pr.revenue;
  return m;
}

// ---------------------------------------------------------------------------
// IC / IR verification

IcIrReport verify_ic_ir(std::span<const MenuContract> contracts, std::span<const double> beliefs,
                        std::span<const std::size_t> own, const ValueFunction& v, double tol) {
  if (own.size() != beliefs.size()) throw DomainError("one contract index per type is required");
  IcIrReport rep;
  rep.tolerance = tol;
  // Gross values are shared across contracts with the same experiment; cache
  // by experiment to keep the quadratic scan cheap.
  std::vector<std::size_t> rep_of(contracts.size());
  std::vector<std::size_t> uniq;
  for (std::size_t c = 0; c < contracts.size(); ++c) {
    std::size_t found = uniq.size();
    for (std::size_t u = 0; u < uniq.size(); ++u) {
      if (contracts[uniq[u]].experiment == contracts[c].experiment) {
        found = u;
        break;
      }
    }
    if (found == uniq.size()) uniq.push_back(c);
    rep_of[c] = found;
  }
  std::vector<double> value(uniq.size());
  for (std::size_t k = 0; k < beliefs.size(); ++k) {
    const double mu = beliefs[k];
    if (own[k] >= contracts.size()) throw DomainError("own contract index out of range");
    for (std::size_t u = 0; u < uniq.size(); ++u) value[u] = experiment_value(contracts[uniq[u]].experiment, mu, v);
    const double mine = value[rep_of[own[k]]] - contracts[own[k]].price;
    const double ir = v(mu) - mine;
    if (ir > rep.worst_violation) {
      rep.worst_violation = ir;
      rep.kind = "IR";
      rep.mu = mu;
      rep.type_index = k;
      rep.deviation.reset();
    }
    for (std::size_t c = 0; c < contracts.size(); ++c) {
      const double gap = value[rep_of[c]] - contracts[c].price - mine;
      if (gap > rep.worst_violation) {
        rep.worst_violation = gap;
        rep.kind = "IC";
        rep.mu = mu;
        rep.type_index = k;
        rep.deviation = c;
      }
    }
    ++rep.types_checked;
  }
  rep.pass = rep.worst_violation <= tol;
  return rep;
}

IcIrReport verify_ic_ir(const OptimalMenu& menu, const ValueFunction& v, double tol) {
  std::vector<MenuContract> contracts;
  std::vector<double> beliefs;
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < menu.records.size(); ++i) {
    contracts.push_back({menu.records[i].contract, menu.records[i].price});
    beliefs.push_back(menu.records[i].mu);
    own.push_back(i);
  }
  return verify_ic_ir(contracts, beliefs, own, v, tol);
}

IcIrReport verify_ic_ir(const DiscreteInstance& inst, const DiscreteMechanism& m, double tol) {
  IcIrReport rep;
  rep.tolerance = tol;
  const std::size_t n = inst.types.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double mine = inst.utility[j][m.assignment[j]] - m.prices[j];
    const double ir = inst.outside[j] - mine;
    if (ir > rep.worst_violation) {
      rep.worst_violation = ir;
      rep.kind = "IR";
      rep.mu = inst.types[j].belief;
      rep.type_index = j;
      rep.deviation.reset();
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = inst.utility[j][m.assignment[i]] - m.prices[i] - mine;
      if (gap > rep.worst_violation) {
        rep.worst_violation = gap;
        rep.kind = "IC";
        rep.mu = inst.types[j].belief;
        rep.type_index = j;
        rep.deviation = i;
      }
    }
    ++rep.types_checked;
  }
  rep.pass = rep.worst_violation <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Structure checks

ThreeSignalReport three_signal_no_improvement(const DiscreteInstance& base, double grid_step, double tol,
                                              const OracleOptions& opts) {
  ThreeSignalReport rep;
  const auto base_m = brute_force_optimal(base, opts);
  rep.base_revenue = base_m.revenue;
  rep.base_exhaustive = base_m.exhaustive;
  rep.base_catalog = base.catalog.size();

  auto catalog = base.catalog;
  for (auto& e : likelihood_grid_catalog(grid_step)) catalog.push_back(std::move(e));
  const auto ext = make_instance(base.types, std::move(catalog), base.v);
  rep.extended_catalog = ext.catalog.size();
  // Base catalog indices are preserved by make_instance (null and full first,
  // then the base entries in order), so the base optimum is a valid seed.
  OracleOptions o = opts;
  o.incumbent = base_m.assignment;
  rep.extended = brute_force_optimal(ext, o);
  rep.extended_revenue = rep.extended.revenue;
  rep.extended_exhaustive = rep.extended.exhaustive;
  rep.gain = rep.extended_revenue - rep.base_revenue;
  rep.pass = rep.gain < tol;
  return rep;
}

namespace {

std::optional<std::string> pattern_violation(const SimpleExperiment& e, double mu, double mu0) {
  if (e.orientation == Orientation::reveal_h && mu > mu0) return "reveal-h sold above mu0";
  if (e.orientation == Orientation::reveal_l && mu < mu0) return "reveal-l sold below mu0";
  return std::nullopt;
}

}  // namespace

PatternReport revealed_state_pattern(const DiscreteInstance& inst, const DiscreteMechanism& m, double mu0) {
  PatternReport rep;
  for (std::size_t j = 0; j < inst.types.size(); ++j) {
    const auto s = as_simple(inst.catalog[m.assignment[j]]);
    if (!s) {
      rep.applicable = false;
      rep.pass = false;
      rep.offending_belief = inst.types[j].belief;
      rep.detail = "type holds a non-simple experiment";
      return rep;
    }
    if (auto why = pattern_violation(s->normalized(), inst.types[j].belief, mu0)) {
      if (rep.pass) {
        rep.pass = false;
        rep.offending_belief = inst.types[j].belief;
        rep.detail = *why;
      }
    }
  }
  return rep;
}

PatternReport revealed_state_pattern(const OptimalMenu& menu) {
  PatternReport rep;
  for (const auto& r : menu.records) {
    if (auto why = pattern_violation(r.contract.normalized(), r.mu, menu.thresholds.mu0)) {
      rep.pass = false;
      rep.offending_belief = r.mu;
      rep.detail = *why;
      return rep;
    }
  }
  return rep;
}

}  // namespace infomenu
