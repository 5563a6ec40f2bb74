#include "infomenu/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <sstream>

namespace infomenu {

using nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void append_record(std::string& out, const MenuRecord& r) {
  out += format_number(r.mu);
  out += ',';
  out += to_string(r.contract.orientation);
  for (double x : {r.contract.noise, r.posterior, r.price, r.surplus, r.gross_utility}) {
    out += ',';
    out += format_number(x);
  }
  out += '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw SchemaError("menu line " + std::to_string(line) + ": column " + column + " is not a number ('" + s + "')");
  }
}

}  // namespace

std::string menu_csv(const std::vector<MenuRecord>& records) {
  std::string out = kMenuHeader;
  out += '\n';
  for (const auto& r : records) append_record(out, r);
  return out;
}

std::vector<MenuRecord> parse_menu_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("menu file is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMenuHeader) throw SchemaError("menu header must be '" + std::string(kMenuHeader) + "'");
  std::vector<MenuRecord> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 7) throw SchemaError("menu line " + std::to_string(n) + ": expected 7 columns");
    MenuRecord r;
    r.mu = parse_number(f[0], n, "mu");
    try {
      r.contract.orientation = orientation_from_string(f[1]);
    } catch (const std::exception&) {
      throw SchemaError("menu line " + std::to_string(n) + ": unknown orientation '" + f[1] + "'");
    }
    r.contract.noise = parse_number(f[2], n, "noise");
    r.posterior = parse_number(f[3], n, "posterior");
    r.price = parse_number(f[4], n, "price");
    r.surplus = parse_number(f[5], n, "surplus");
    r.gross_utility = parse_number(f[6], n, "gross_utility");
    if (r.mu < 0.0 || r.mu > 1.0) throw SchemaError("menu line " + std::to_string(n) + ": mu outside [0,1]");
    if (r.contract.noise < 0.0 || r.contract.noise > 1.0) {
      throw SchemaError("menu line " + std::to_string(n) + ": noise outside [0,1]");
    }
    if (!out.empty() && r.mu < out.back().mu) throw SchemaError("menu rows must be sorted by mu");
    out.push_back(r);
  }
  return out;
}

std::string sweep_csv(const FamilySweep& sweep) {
  std::string out = kSweepHeader;
  out += '\n';
  for (const auto& m : sweep.members) {
    if (!m.ok) continue;
    for (const auto& r : m.menu.records) {
      out += format_number(m.t);
      out += ',';
      append_record(out, r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

ordered_json to_json(const ThresholdSet& t) {
  ordered_json j;
  j["lambda"] = t.lambda;
  j["mu_minus"] = t.mu_minus;
  j["mu0"] = t.mu0;
  j["mu_plus"] = t.mu_plus;
  j["exclusion_lo"] = t.exclusion_lo;
  j["exclusion_hi"] = t.exclusion_hi;
  return j;
}

namespace {
ordered_json opt(const std::optional<double>& x) { return x ? ordered_json(*x) : ordered_json(nullptr); }
}  // namespace

ordered_json to_json(const AssumptionReport& r) {
  ordered_json j;
  j["condition"] = r.condition;
  j["pass"] = r.pass;
  j["inconclusive"] = r.inconclusive;
  j["worst_violation"] = r.worst_violation;
  j["tolerance"] = r.tolerance;
  j["expression"] = r.expression;
  j["mu"] = opt(r.mu);
  j["mu_next"] = opt(r.mu_next);
  j["nu"] = opt(r.nu);
  j["nu_next"] = opt(r.nu_next);
  j["lambda"] = opt(r.lambda);
  j["points_checked"] = r.points_checked;
  j["points_guarded"] = r.points_guarded;
  j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const IcIrReport& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["worst_violation"] = r.worst_violation;
  j["tolerance"] = r.tolerance;
  j["kind"] = r.kind;
  j["mu"] = r.mu;
  j["type_index"] = r.type_index;
  j["deviation"] = r.deviation ? ordered_json(*r.deviation) : ordered_json(nullptr);
  j["types_checked"] = r.types_checked;
  return j;
}

ordered_json to_json(const MonotoneReport& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  j["violations"] = r.violations;
  return j;
}

ordered_json to_json(const HScan& s) {
  ordered_json j;
  j["region"] = s.region;
  j["guarded"] = s.guarded;
  j["h1"] = to_string(s.h1);
  j["h2"] = to_string(s.h2);
  j["required"] = s.required;
  j["pass"] = s.pass;
  j["worst_nu"] = s.worst_nu;
  return j;
}

ordered_json to_json(const FlatPrice& f) {
  ordered_json j;
  j["price"] = f.price;
  j["revenue"] = f.revenue;
  j["served"] = ordered_json::array();
  for (const auto& [a, b] : f.served) j["served"].push_back({a, b});
  return j;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  ordered_json v;
  v["kind"] = c.value.kind;
  v["scale"] = c.value.scale;
  v["coefficients"] = c.value.coefficients;
  v["actions"] = ordered_json::array();
  for (const auto& a : c.value.actions) v["actions"].push_back({a.payoff_l, a.payoff_h});
  v["name"] = c.value.builtin;
  j["value_function"] = v;
  ordered_json d;
  d["kind"] = c.density.kind;
  d["slope"] = c.density.slope;
  d["t"] = c.density.t;
  d["base"] = c.density.base;
  d["knots"] = c.density.knots;
  d["values"] = c.density.values;
  j["density"] = d;
  j["grid"] = {{"menu", c.menu_grid}, {"assumptions", c.assumption_grid}, {"verify", c.verify_grid}};
  j["tolerances"] = {{"verify", c.verify_tol}, {"revenue", c.revenue_tol}, {"three_signal", c.three_signal_tol}};
  j["lambda"] = {{"lo", c.lambda_lo}, {"hi", c.lambda_hi}};
  j["oracle"] = {{"types", c.oracle_types},
                 {"type_lo", c.oracle_type_lo},
                 {"type_hi", c.oracle_type_hi},
                 {"noise_step", c.oracle_noise_step},
                 {"budget", c.oracle_budget},
                 {"restarts", c.oracle_restarts},
                 {"fallback", c.oracle_fallback},
                 {"three_signal_types", c.three_signal_types},
                 {"three_signal_step", c.three_signal_step}};
  j["sweep"] = {{"t", c.sweep_t}, {"probes", c.sweep_probes}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["override_assumptions"] = c.override_assumptions;
  return j;
}

ordered_json to_json(const GeneralExperiment& e) {
  ordered_json j = ordered_json::array();
  for (const auto& s : e.signals()) j.push_back({{"given_h", s.given_h}, {"given_l", s.given_l}});
  return j;
}

ordered_json to_json(const DiscreteInstance& inst) {
  ordered_json j;
  j["types"] = ordered_json::array();
  for (const auto& t : inst.types) j["types"].push_back({{"belief", t.belief}, {"weight", t.weight}});
  j["catalog"] = ordered_json::array();
  for (const auto& e : inst.catalog) j["catalog"].push_back(to_json(e));
  j["value_function"] = inst.v.name();
  return j;
}

ordered_json to_json(const DiscreteInstance& inst, const DiscreteMechanism& m) {
  ordered_json j;
  j["mode"] = m.mode;
  j["exhaustive"] = m.exhaustive;
  j["nodes"] = m.nodes;
  j["revenue"] = m.revenue;
  j["types"] = ordered_json::array();
  for (std::size_t i = 0; i < m.assignment.size(); ++i) {
    ordered_json t;
    t["belief"] = inst.types[i].belief;
    t["catalog_index"] = m.assignment[i];
    if (const auto s = as_simple(inst.catalog[m.assignment[i]])) {
      t["orientation"] = to_string(s->orientation);
      t["noise"] = s->noise;
    } else {
      t["experiment"] = to_json(inst.catalog[m.assignment[i]]);
    }
    t["price"] = m.prices.empty() ? 0.0 : m.prices[i];
    j["types"].push_back(t);
  }
  return j;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
  bool dashed = false;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

class Panel {
 public:
  Panel(double left, double top, double width, double height, std::string title)
      : left_(left), top_(top), width_(width), height_(height), title_(std::move(title)) {}

  void add(Series s) { series_.push_back(std::move(s)); }

  void render(std::ostringstream& os) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series_) {
      for (double y : s.y) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
    if (!(lo < hi)) {
      lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
      hi = lo + 2.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto px = [&](double x) { return left_ + x * width_; };
    auto py = [&](double y) { return top_ + height_ * (1.0 - (y - lo) / (hi - lo)); };
    os << "<rect x=\"" << left_ << "\" y=\"" << top_ << "\" width=\"" << width_ << "\" height=\"" << height_
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << left_ << "\" y=\"" << top_ - 8 << "\" font-size=\"13\">" << title_ << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      const double x = k / 4.0;
      os << "<text x=\"" << px(x) - 8 << "\" y=\"" << top_ + height_ + 14 << "\" font-size=\"10\">" << x
         << "</text>\n";
      const double y = lo + (hi - lo) * k / 4.0;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", y);
      os << "<text x=\"" << left_ - 44 << "\" y=\"" << py(y) + 3 << "\" font-size=\"10\">" << buf << "</text>\n";
    }
    double ly = top_ + 14;
    for (const auto& s : series_) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) os << " stroke-dasharray=\"6,4\"";
      os << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        os << buf;
      }
      os << "\"/>\n";
      os << "<text x=\"" << left_ + width_ + 10 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\"" << s.color
         << "\">" << s.label << "</text>\n";
      ly += 15;
    }
  }

 private:
  double left_, top_, width_, height_;
  std::string title_;
  std::vector<Series> series_;
};

std::string document(const std::vector<Panel>& panels, double height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"" << height
     << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& p : panels) p.render(os);
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string menu_svg_from_csv(const std::string& csv) {
  const auto recs = parse_menu_csv(csv);
  Series value{"V(mu)", {}, {}, "#000000", false};
  Series gross{"gross utility", {}, {}, "#1f77b4", true};
  Series price{"price", {}, {}, "#d62728", false};
  Series surplus{"surplus", {}, {}, "#2ca02c", false};
  for (const auto& r : recs) {
    // Net utility is V + surplus, so V = gross - price - surplus.
    value.x.push_back(r.mu);
    value.y.push_back(r.gross_utility - r.price - r.surplus);
    gross.x.push_back(r.mu);
    gross.y.push_back(r.gross_utility);
    price.x.push_back(r.mu);
    price.y.push_back(r.price);
    surplus.x.push_back(r.mu);
    surplus.y.push_back(r.surplus);
  }
  Panel top(60, 30, 560, 260, "value and gross utility");
  top.add(value);
  top.add(gross);
  Panel bottom(60, 340, 560, 200, "price and surplus");
  bottom.add(price);
  bottom.add(surplus);
  return document({top, bottom}, 580);
}

std::string sweep_svg_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw SchemaError("sweep header mismatch");
  std::map<double, std::string> by_t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma));
    auto& chunk = by_t[t];
    if (chunk.empty()) chunk = std::string(kMenuHeader) + "\n";
    chunk += line.substr(comma + 1) + "\n";
  }
  Panel top(60, 30, 560, 260, "gross utility by t");
  Panel bottom(60, 340, 560, 200, "surplus by t");
  std::size_t k = 0;
  for (const auto& [t, chunk] : by_t) {
    const auto recs = parse_menu_csv(chunk);
    const std::string color = kPalette[k++ % (sizeof kPalette / sizeof kPalette[0])];
    char label[32];
    std::snprintf(label, sizeof label, "t=%g", t);
    Series g{label, {}, {}, color, true};
    Series s{label, {}, {}, color, false};
    for (const auto& r : recs) {
      g.x.push_back(r.mu);
      g.y.push_back(r.gross_utility);
      s.x.push_back(r.mu);
      s.y.push_back(r.surplus);
    }
    top.add(g);
    bottom.add(s);
  }
  return document({top, bottom}, 580);
}

}  // namespace infomenu
