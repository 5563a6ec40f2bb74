#include "infomenu/comparative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infomenu/errors.hpp"
#include "infomenu/numerics.hpp"

namespace infomenu {

namespace {

struct Tilt {
  double c = 0.25;
  double b = 1.0;

  double r(double mu) const {
    const double x = mu <= 0.5 ? mu : 1.0 - mu;
    return x <= c ? c - x : b * (c - x);
  }
  // Integral of r over [0, mu].
  double integral(double mu) const {
    if (mu > 0.5) return -integral(1.0 - mu);
    if (mu <= c) return c * mu - 0.5 * mu * mu;
    return 0.5 * c * c - 0.5 * b * (mu - c) * (mu - c);
  }
};

Tilt make_tilt(const BeliefDensity& base) {
  if (!base.symmetric()) throw DomainError("rotation needs a symmetric base density");
  Tilt k;
  k.c = rotation_pivot(base);
  k.b = k.c * k.c / ((0.5 - k.c) * (0.5 - k.c));
  return k;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

double rotation_pivot(const BeliefDensity& base) { return solve_thresholds(base, 0.5).mu_minus; }

double rotation_max_t(const BeliefDensity& base) {
  const Tilt k = make_tilt(base);
  double t_max = std::numeric_limits<double>::infinity();
  constexpr int kScan = 4096;
  for (int i = 0; i <= kScan; ++i) {
    const double mu = k.c + (0.5 - k.c) * i / kScan;
    const double r = k.r(mu);
    if (r < 0.0) t_max = std::min(t_max, base.pdf(mu) / -r);
  }
  return t_max;
}

BeliefDensity rotation_density(const BeliefDensity& base, double t) {
  if (t < 0.0) throw DomainError("rotation parameter must be non-negative");
  if (t == 0.0) return base;
  const Tilt k = make_tilt(base);
  const double t_max = rotation_max_t(base);
  if (t > t_max) throw DomainError("rotation parameter " + fmt(t) + " makes the density negative; max feasible t is " + fmt(t_max));
  auto pdf = [base, k, t](double mu) { return base.pdf(mu) + t * k.r(mu); };
  auto cdf = [base, k, t](double mu) { return std::clamp(base.cdf(mu) + t * k.integral(mu), 0.0, 1.0); };
  return BeliefDensity(pdf, cdf, {}, true, base.name() + "+rotation(" + fmt(t) + ")");
}

DispersionReport is_more_dispersed(const BeliefDensity& f, const BeliefDensity& g) {
  DispersionReport rep;
  rep.mu_minus_g = numerics::bisect([&](double m) { return g.pdf(m) * m + g.cdf(m) - 0.5; }, 0.0, 0.5, 1e-14,
                                    "g(mu)mu + G(mu) - 0.5 = 0")
                       .x;
  auto alt = [&](double m) { return g.pdf(m) + g.cdf(m) - 0.5; };
  if ((alt(0.0) > 0.0) != (alt(0.5) > 0.0)) {
    rep.alternate_root = numerics::bisect(alt, 0.0, 0.5, 1e-14, "g(mu) + G(mu) - 0.5 = 0").x;
    rep.notes.push_back("g(mu) + G(mu) - 0.5 = 0 has root " + fmt(*rep.alternate_root) +
                        "; the range uses the threshold equation root " + fmt(rep.mu_minus_g));
  } else {
    rep.notes.push_back("g(mu) + G(mu) - 0.5 = 0 has no root in (0, 0.5); the range uses the threshold equation root " +
                        fmt(rep.mu_minus_g));
  }
  const auto grid = interior_grid(512, 0.0, rep.mu_minus_g);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double mu : grid) {
    const double rf = f.pdf(mu) / (0.5 - f.cdf(mu));
    const double rg = g.pdf(mu) / (0.5 - g.cdf(mu));
    const double margin = rf - rg;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_mu = mu;
    }
    ++rep.points;
  }
  rep.more_dispersed = rep.worst_margin >= -1e-10;
  return rep;
}

const char* to_string(BlackwellOrder o) {
  switch (o) {
    case BlackwellOrder::dominates: return "dominates";
    case BlackwellOrder::dominated: return "dominated";
    case BlackwellOrder::equal: return "equal";
    case BlackwellOrder::incomparable: return "incomparable";
  }
  return "?";
}

BlackwellOrder blackwell_compare(const SimpleExperiment& a_in, const SimpleExperiment& b_in) {
  const auto a = a_in.normalized();
  const auto b = b_in.normalized();
  auto rank = [](const SimpleExperiment& e) {
    return e.orientation == Orientation::full ? 2 : e.orientation == Orientation::null ? 0 : 1;
  };
  const int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra > rb ? BlackwellOrder::dominates : BlackwellOrder::dominated;
  if (ra != 1) return BlackwellOrder::equal;
  if (a.orientation != b.orientation) return BlackwellOrder::incomparable;
  if (std::abs(a.noise - b.noise) <= 1e-12) return BlackwellOrder::equal;
  return a.noise > b.noise ? BlackwellOrder::dominates : BlackwellOrder::dominated;
}

FamilySweep solve_family(const BeliefDensity& base, std::span<const double> ts, const ValueFunction& v,
                         const MenuOptions& opts) {
  FamilySweep sweep;
  sweep.base = base;
  sweep.v = v;
  std::vector<double> sorted(ts.begin(), ts.end());
  std::sort(sorted.begin(), sorted.end());
  for (double t : sorted) {
    FamilyMember m;
    m.t = t;
    try {
      m.menu = build_menu(v, rotation_density(base, t), opts);
      m.ok = true;
    } catch (const std::exception& e) {
      m.error = e.what();
    }
    sweep.members.push_back(std::move(m));
  }
  return sweep;
}

namespace {

void violation(MonotoneReport& rep, double amount, std::string what) {
  rep.pass = false;
  rep.worst = std::max(rep.worst, amount);
  rep.violations.push_back(std::move(what));
}

void require_ok(MonotoneReport& rep, const FamilySweep& sweep) {
  for (const auto& m : sweep.members) {
    if (!m.ok) violation(rep, 0.0, "t=" + fmt(m.t) + " failed: " + m.error);
  }
}

}  // namespace

MonotoneReport thresholds_monotone(const FamilySweep& sweep) {
  MonotoneReport rep;
  require_ok(rep, sweep);
  const auto& ms = sweep.members;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (!ms[i - 1].ok || !ms[i].ok) continue;
    const auto& a = ms[i - 1].menu.thresholds;
    const auto& b = ms[i].menu.thresholds;
    const std::string span = " from t=" + fmt(ms[i - 1].t) + " to t=" + fmt(ms[i].t);
    auto check = [&](double before, double after, bool increasing, const char* name) {
      const double excess = increasing ? before - after : after - before;
      if (excess > kComparativeSlack) violation(rep, excess, std::string(name) + " moved the wrong way" + span);
    };
    check(a.mu_minus, b.mu_minus, false, "mu_minus");
    check(a.mu_plus, b.mu_plus, true, "mu_plus");
    check(a.exclusion_lo, b.exclusion_lo, false, "low exclusion point");
    check(a.exclusion_hi, b.exclusion_hi, true, "high exclusion point");
  }
  return rep;
}

MonotoneReport blackwell_monotone(const FamilySweep& sweep, std::span<const double> probes) {
  MonotoneReport rep;
  require_ok(rep, sweep);
  if (!sweep.base || !sweep.v) return rep;
  const auto& ms = sweep.members;
  std::vector<std::vector<SimpleExperiment>> contracts(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!ms[i].ok) continue;
    const auto f = rotation_density(*sweep.base, ms[i].t);
    for (double mu : probes) contracts[i].push_back(contract_at(mu, ms[i].menu.thresholds, *sweep.v, f));
  }
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      if (!ms[i].ok || !ms[j].ok) continue;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto lo = contracts[i][k].normalized();
        const auto hi = contracts[j][k].normalized();
        const auto order = blackwell_compare(hi, lo);
        if (order == BlackwellOrder::dominates || order == BlackwellOrder::equal) continue;
        const std::string where = "probe " + fmt(probes[k]) + ", t=" + fmt(ms[i].t) + " vs t=" + fmt(ms[j].t);
        if (order == BlackwellOrder::dominated && hi.orientation == lo.orientation &&
            lo.noise - hi.noise <= kComparativeSlack) {
          continue;
        }
        if (order == BlackwellOrder::incomparable) {
          violation(rep, 1.0, "orientation flip at " + where);
        } else {
          const double amount = hi.orientation == lo.orientation ? lo.noise - hi.noise : 1.0;
          violation(rep, amount, "less informative contract at " + where);
        }
      }
    }
  }
  return rep;
}

MonotoneReport surplus_monotone(const FamilySweep& sweep, std::span<const double> probes) {
  MonotoneReport rep;
  require_ok(rep, sweep);
  const auto& ms = sweep.members;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (!ms[i - 1].ok || !ms[i].ok) continue;
    for (double mu : probes) {
      const double drop = ms[i - 1].menu.surplus_at(mu) - ms[i].menu.surplus_at(mu);
      if (drop > kComparativeSlack) {
        violation(rep, drop, "surplus fell at probe " + fmt(mu) + " from t=" + fmt(ms[i - 1].t) + " to t=" +
                                 fmt(ms[i].t));
      }
    }
  }
  return rep;
}

MonotoneReport dispersion_chain(const BeliefDensity& base, std::span<const double> ts) {
  MonotoneReport rep;
  std::vector<double> sorted(ts.begin(), ts.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto g = rotation_density(base, sorted[i - 1]);
    const auto f = rotation_density(base, sorted[i]);
    const auto d = is_more_dispersed(f, g);
    if (!d.more_dispersed) {
      violation(rep, -d.worst_margin, "t=" + fmt(sorted[i]) + " not more dispersed than t=" + fmt(sorted[i - 1]) +
                                          " (worst at mu=" + fmt(d.worst_mu) + ")");
    }
  }
  return rep;
}

}  // namespace infomenu
