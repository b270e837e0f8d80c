#pragma once

// Parameter sweeps producing the rate CSV, analytic-vs-Monte-Carlo
// comparison of such a CSV, flat key = value configuration files and the
// figure presets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <locale>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "crs/caching.hpp"
#include "crs/core_model.hpp"
#include "crs/montecarlo.hpp"
#include "crs/rate_analysis.hpp"

namespace crs {

inline constexpr const char* kCsvHeader =
    "var,value,mode,subcase,omega_c,omega_e,iic,method,R_c,R_e,R_sum,q_c,q_e,stderr_Rc,stderr_Re,stderr_Rsum";

/// %.9g with a '.' separator regardless of the global locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  std::string s(buf);
  for (auto& c : s)
    if (c == ',') c = '.';
  return s;
}

enum class SweepVar { Beta, Rho, U, P };

constexpr std::string_view to_string(SweepVar v) noexcept {
  switch (v) {
    case SweepVar::Beta: return "beta";
    case SweepVar::Rho: return "rho";
    case SweepVar::U: return "u";
    case SweepVar::P: return "P";
  }
  return "?";
}

inline SweepVar parse_sweep_var(std::string_view s) {
  for (auto v : {SweepVar::Beta, SweepVar::Rho, SweepVar::U, SweepVar::P})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown sweep variable: " + std::string(s));
}

enum class Methods { Analytic, MonteCarlo, Both };

inline Methods parse_methods(std::string_view s) {
  if (s == "analytic") return Methods::Analytic;
  if (s == "mc") return Methods::MonteCarlo;
  if (s == "both") return Methods::Both;
  throw std::invalid_argument("methods must be analytic, mc or both");
}

struct SweepSpec {
  SweepVar var = SweepVar::Beta;
  double from = 0.1;
  double to = 0.9;
  int points = 9;
  bool log_scale = false;
  SystemParams params;
  PowerSplit split;
  SimConfig sim;
  Mode mode = Mode::AllMPC;
  std::vector<Subcase> subcases;  // empty: every subcase of the mode
  Methods methods = Methods::Analytic;
  bool asymptotic = false;   // also emit infinite-power rows
  std::string series;        // appended to the subcase label, e.g. "K=2;u=0.2"

  std::vector<double> grid() const {
    std::vector<double> g;
    for (int k = 0; k < points; ++k) {
      const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
      g.push_back(log_scale ? std::exp(std::log(from) + f * (std::log(to) - std::log(from))) : from + f * (to - from));
    }
    g.back() = to;
    return g;
  }

  std::vector<Subcase> selected() const { return subcases.empty() ? all_subcases(mode, params.K) : subcases; }

  void validate() const {
    if (points < 2) throw std::invalid_argument("a sweep needs at least 2 points");
    if (!(from <= to)) throw std::invalid_argument("sweep range must satisfy from <= to");
    if (log_scale && !(from > 0)) throw std::invalid_argument("log-scale sweeps need a positive start");
    switch (var) {
      case SweepVar::Beta:
      case SweepVar::Rho:
        if (!(from >= 0 && to <= 1)) throw std::invalid_argument("beta/rho sweeps must stay in [0,1]");
        break;
      case SweepVar::U:
        if (!(from >= 0 && to <= 1)) throw std::invalid_argument("u sweeps must stay in [0,1]");
        break;
      case SweepVar::P:
        if (!(from > 0)) throw std::invalid_argument("P sweeps must stay positive");
        break;
    }
    params.validate();
    sim.validate();
    for (const auto& sc : selected()) {
      if (sc.mode != mode) throw std::invalid_argument("subcase " + sc.label() + " does not belong to the sweep mode");
      sc.validate(params.K);
      if ((sc.i == 3 || sc.j == 3) && !params.coded_caching_valid())
        throw std::invalid_argument("XOR subcases need t = MK/N integer in {1,...,K-1}");
    }
  }

  /// Parameters at one grid point.
  std::pair<SystemParams, PowerSplit> at(double x) const {
    auto p = params;
    auto s = split;
    switch (var) {
      case SweepVar::Beta: s = PowerSplit(x, s.rho); break;
      case SweepVar::Rho: s = PowerSplit(s.beta, x); break;
      case SweepVar::U: p.u = x; break;
      case SweepVar::P: p.P = x; break;
    }
    return {p, s};
  }
};

/// Thrown when a computed rate is not a finite number.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_row(std::ostream& os, const SweepSpec& spec, double x, const Subcase& sc, std::string_view method,
                      double rc, double re, double rs, double qc, double qe, double ec, double ee, double es) {
  std::string label = sc.label();
  if (!spec.series.empty()) label += "[" + spec.series + "]";
  os << to_string(spec.var) << ',' << format_number(x) << ',' << to_string(sc.mode) << ',' << label << ',' << sc.i
     << ',' << sc.j << ',' << to_string(sc.iic_at) << ',' << method;
  for (double v : {rc, re, rs, qc, qe, ec, ee, es}) os << ',' << format_number(v);
  os << '\n';
}

inline void check_finite(const RateReport& r, const Subcase& sc, double x) {
  for (double v : r.value)
    if (!std::isfinite(v))
      throw NumericalFailure("non-finite rate for subcase " + sc.label() + " at grid value " + format_number(x));
}

}  // namespace detail

/// Writes the rows of one spec (no header): per grid point, per subcase,
/// analytic then mc then asymptotic.
inline void run_sweep_rows(const SweepSpec& spec, std::ostream& os) {
  spec.validate();
  const auto subcases = spec.selected();
  for (double x : spec.grid()) {
    const auto [p, s] = spec.at(x);
    std::vector<RateReport> analytic, mc;
    if (spec.methods != Methods::MonteCarlo) {
      RateAnalyzer a(p, s);
      for (const auto& sc : subcases) analytic.push_back(a.report(sc));
    }
    if (spec.methods != Methods::Analytic) mc = estimate_rates(subcases, p, s, spec.sim);
    for (std::size_t k = 0; k < subcases.size(); ++k) {
      const auto& sc = subcases[k];
      for (const auto* r : {analytic.empty() ? nullptr : &analytic[k], mc.empty() ? nullptr : &mc[k]}) {
        if (!r) continue;
        detail::check_finite(*r, sc, x);
        detail::write_row(os, spec, x, sc, to_string(r->method), r->R_center(), r->R_edge(), r->R_sum(),
                          r->q_center(), r->q_edge(), r->error(RateField::RCenter), r->error(RateField::REdge),
                          r->error(RateField::RSum));
      }
      if (spec.asymptotic) {
        const auto c = asymptotic_rate(ReceiverClass::Center, sc.i, p, s, iic_context(sc.iic_at, ReceiverClass::Center));
        const auto e = asymptotic_rate(ReceiverClass::Edge, sc.j, p, s, iic_context(sc.iic_at, ReceiverClass::Edge));
        const auto sum = asymptotic_sum_rate(sc, p, s);
        detail::write_row(os, spec, x, sc, "asymptotic", c.unbounded ? kInf : c.value, e.unbounded ? kInf : e.value,
                          sum.unbounded ? kInf : sum.value, 1.0, 1.0, 0.0, 0.0, 0.0);
      }
    }
  }
}

inline void run_sweep(const SweepSpec& spec, std::ostream& os) {
  os << kCsvHeader << '\n';
  run_sweep_rows(spec, os);
}

inline void run_sweep(const SweepSpec& spec, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  run_sweep(spec, f);
  if (!f) throw std::runtime_error("write failed for " + path);
}

/// Worst analytic-vs-mc z-scores of a CSV written with methods = both.
struct CompareReport {
  struct Entry {
    std::string key;  // mode/subcase
    double worst_z = 0;
    std::string where;  // quantity and grid value of the worst row
  };
  std::vector<Entry> per_subcase;
  double worst_z = 0;
  std::size_t pairs = 0;
  bool pass() const noexcept { return pairs > 0 && worst_z <= 3.0; }
};

struct MalformedCsv : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v = 0;
  if (!(is >> v) || !is.eof()) throw MalformedCsv("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

// |a - m| / stderr; an exact zero-variance match scores 0.
inline double z_score(double a, double m, double se) {
  const double diff = std::abs(a - m);
  if (se > 0) return diff / se;
  return diff <= 1e-12 * std::max(1.0, std::abs(a)) ? 0.0 : kInf;
}

}  // namespace detail

inline CompareReport compare_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw MalformedCsv("unexpected header");
  struct Values {
    double rc, re, rs, ec, ee, es;
    std::string value;
  };
  std::map<std::string, Values> analytic, mc;
  std::vector<std::string> order;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 16) throw MalformedCsv("line " + std::to_string(lineno) + ": expected 16 fields");
    const std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[4] + "," + f[5] + "," + f[6];
    Values v{detail::parse_number(f[8], lineno),  detail::parse_number(f[9], lineno),
             detail::parse_number(f[10], lineno), detail::parse_number(f[13], lineno),
             detail::parse_number(f[14], lineno), detail::parse_number(f[15], lineno), f[0] + "=" + f[1]};
    if (f[7] == "analytic") {
      if (!analytic.count(key) && !mc.count(key)) order.push_back(key);
      analytic[key] = v;
    } else if (f[7] == "mc") {
      if (!analytic.count(key) && !mc.count(key)) order.push_back(key);
      mc[key] = v;
    } else if (f[7] != "asymptotic") {
      throw MalformedCsv("line " + std::to_string(lineno) + ": unknown method '" + f[7] + "'");
    }
  }
  CompareReport rep;
  std::map<std::string, std::size_t> slot;
  for (const auto& key : order) {
    const auto a = analytic.find(key);
    const auto m = mc.find(key);
    if (a == analytic.end() || m == mc.end()) continue;
    const auto f = detail::split_csv_line(key);
    const std::string group = f[2] + "/" + f[3];
    if (!slot.count(group)) {
      slot[group] = rep.per_subcase.size();
      rep.per_subcase.push_back({group, 0.0, ""});
    }
    auto& e = rep.per_subcase[slot[group]];
    const std::pair<const char*, double> zs[] = {
        {"R_c", detail::z_score(a->second.rc, m->second.rc, m->second.ec)},
        {"R_e", detail::z_score(a->second.re, m->second.re, m->second.ee)},
        {"R_sum", detail::z_score(a->second.rs, m->second.rs, m->second.es)}};
    for (const auto& [name, z] : zs) {
      if (e.where.empty() || z > e.worst_z) {
        e.worst_z = z;
        e.where = std::string(name) + " at " + a->second.value;
      }
      rep.worst_z = std::max(rep.worst_z, z);
    }
    ++rep.pairs;
  }
  if (rep.pairs == 0) throw MalformedCsv("no analytic/mc row pairs found");
  return rep;
}

inline void print_compare_report(const CompareReport& r, std::ostream& os) {
  for (const auto& e : r.per_subcase)
    os << e.key << ": worst z = " << format_number(e.worst_z) << " (" << e.where << ")\n";
  os << "pairs: " << r.pairs << ", worst z = " << format_number(r.worst_z) << ", " << (r.pass() ? "PASS" : "FAIL")
     << '\n';
}

/// Applies `key = value` lines ('#' starts a comment) to the given structures.
struct ConfigTargets {
  SystemParams* params = nullptr;
  PowerSplit* split = nullptr;
  SimConfig* sim = nullptr;
};

inline std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

inline void apply_config(const std::map<std::string, std::string>& kv, ConfigTargets t) {
  auto num = [](const std::string& k, const std::string& v) {
    std::istringstream is(v);
    is.imbue(std::locale::classic());
    double x = 0;
    if (!(is >> x) || !is.eof()) throw std::invalid_argument("config key " + k + ": bad number '" + v + "'");
    return x;
  };
  auto integer = [&](const std::string& k, const std::string& v) {
    const double x = num(k, v);
    if (x != std::floor(x)) throw std::invalid_argument("config key " + k + " must be an integer");
    return x;
  };
  for (const auto& [k, v] : kv) {
    SystemParams& p = *t.params;
    if (k == "P") p.P = num(k, v);
    else if (k == "sigma2") p.sigma2 = num(k, v);
    else if (k == "alpha") p.alpha = num(k, v);
    else if (k == "r_c") p.r_c = num(k, v);
    else if (k == "r_e") p.r_e = num(k, v);
    else if (k == "r_0") p.r_0 = num(k, v);
    else if (k == "K") p.K = static_cast<int>(integer(k, v));
    else if (k == "M") p.M = static_cast<int>(integer(k, v));
    else if (k == "N") p.N = static_cast<int>(integer(k, v));
    else if (k == "F") p.F = static_cast<int>(integer(k, v));
    else if (k == "zeta") p.zeta = num(k, v);
    else if (k == "xi") p.xi = num(k, v);
    else if (k == "u") p.u = num(k, v);
    else if (k == "beta") *t.split = PowerSplit(num(k, v), t.split->rho);
    else if (k == "rho") *t.split = PowerSplit(t.split->beta, num(k, v));
    else if (k == "seed") t.sim->seed = static_cast<std::uint64_t>(integer(k, v));
    else if (k == "samples") t.sim->samples = static_cast<std::uint64_t>(integer(k, v));
    else if (k == "chunk") t.sim->chunk = static_cast<std::uint64_t>(integer(k, v));
    else if (k == "workers") t.sim->workers = static_cast<unsigned>(integer(k, v));
    else throw std::invalid_argument("unknown config key: " + k);
  }
}

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
  return names;
}

/// Sweep specs reproducing the setups of the rate figures. `base` supplies
/// the defaults, simulation settings and method selection.
inline std::vector<SweepSpec> figure_specs(const std::string& name, const SweepSpec& base) {
  auto beta_sweep = [&](Mode m) {
    SweepSpec s = base;
    s.var = SweepVar::Beta;
    s.from = 0.05;
    s.to = 0.95;
    s.points = 19;
    s.log_scale = false;
    s.mode = m;
    s.subcases.clear();
    return s;
  };
  std::vector<SweepSpec> out;
  if (name == "fig3" || name == "fig4") {
    // Per-receiver rates of every subcase; the center and edge columns are
    // read from the same rows.
    for (auto m : {Mode::CC_MPC, Mode::MPC_CC, Mode::AllCC}) out.push_back(beta_sweep(m));
  } else if (name == "fig5") {
    out.push_back(beta_sweep(Mode::CC_MPC));
  } else if (name == "fig6") {
    out.push_back(beta_sweep(Mode::MPC_CC));
  } else if (name == "fig7") {
    out.push_back(beta_sweep(Mode::AllCC));
  } else if (name == "fig8") {
    for (int K : {2, 4})
      for (double u : {0.2, 0.5}) {
        SweepSpec s = base;
        s.var = SweepVar::Rho;
        s.from = 0.0;
        s.to = 1.0;
        s.points = 21;
        s.log_scale = false;
        s.mode = Mode::AllCC;
        s.params.N = 60;
        s.params.F = std::max(s.params.F, 60);
        s.params.K = K;
        s.params.u = u;
        s.params.zeta = 0.5;
        s.params.xi = 2.0;
        s.split = PowerSplit(0.7, s.split.rho);
        s.subcases = {make_subcase(Mode::AllCC, 3, 3, IicAt::None, K)};
        s.series = "K=" + std::to_string(K) + ";u=" + format_number(u);
        out.push_back(s);
      }
  } else if (name == "fig9") {
    auto p_sweep = [&](double beta, double xi, std::string series) {
      SweepSpec s = base;
      s.var = SweepVar::P;
      s.from = 1.0;
      s.to = 1e8;
      s.points = 17;
      s.log_scale = true;
      s.params.N = 60;
      s.params.F = std::max(s.params.F, 60);
      s.params.K = 2;
      s.params.zeta = 1.0;
      s.params.xi = xi;
      s.split = PowerSplit(beta, 0.5);
      s.asymptotic = true;
      s.series = std::move(series);
      return s;
    };
    auto loads = p_sweep(0.6, 2.0, "");
    loads.mode = Mode::AllCC;
    loads.subcases = {make_subcase(Mode::AllCC, 1, 1, IicAt::None, 2), make_subcase(Mode::AllCC, 2, 2, IicAt::None, 2),
                      make_subcase(Mode::AllCC, 3, 3, IicAt::None, 2)};
    out.push_back(loads);
    for (auto [beta, xi, tag] : {std::tuple{0.6, 2.0, "case-i"}, std::tuple{0.3, 1.0, "case-ii"}}) {
      auto s = p_sweep(beta, xi, tag);
      s.mode = Mode::MPC_CC;
      s.subcases = {make_subcase(Mode::MPC_CC, 1, 3, IicAt::Center, 2)};
      out.push_back(s);
    }
  } else {
    throw std::invalid_argument("unknown figure: " + name);
  }
  return out;
}

inline void run_figure(const std::string& name, const SweepSpec& base, std::ostream& os) {
  const auto specs = figure_specs(name, base);
  for (const auto& s : specs) s.validate();
  os << kCsvHeader << '\n';
  for (const auto& s : specs) run_sweep_rows(s, os);
}

}  // namespace crs
