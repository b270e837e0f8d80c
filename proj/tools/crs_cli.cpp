// crs: sweeps, comparisons, coverage checks and placement dumps for the
// caching-aided rate-splitting model.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crs/crs.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCompare = 3;

// Flags that override config-file and environment values when given.
struct Overrides {
  std::optional<double> P, sigma2, alpha, r_c, r_e, r_0, zeta, xi, u, beta, rho;
  std::optional<int> K, M, N, F;
  std::optional<std::uint64_t> seed, samples, chunk;
  std::optional<unsigned> workers;
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("--P", P, "transmit power");
    app->add_option("--sigma2", sigma2, "noise variance");
    app->add_option("--alpha", alpha, "path-loss exponent");
    app->add_option("--r-c", r_c, "center disk radius [m]");
    app->add_option("--r-e", r_e, "edge ring inner radius [m]");
    app->add_option("--r-0", r_0, "cell radius [m]");
    app->add_option("-K", K, "receivers per class");
    app->add_option("-M", M, "cache size in files");
    app->add_option("-N", N, "coded catalog size");
    app->add_option("--F", F, "library size");
    app->add_option("--zeta", zeta, "common-stream SINR threshold");
    app->add_option("--xi", xi, "private-stream base threshold");
    app->add_option("--u", u, "center share of the common rate");
    app->add_option("--beta", beta, "fraction of power on the common stream");
    app->add_option("--rho", rho, "center share of the private power");
    app->add_option("--seed", seed, "Monte-Carlo seed (overrides CRS_SEED)");
    app->add_option("--samples", samples, "Monte-Carlo draws");
    app->add_option("--chunk", chunk, "draws per work unit");
    app->add_option("--workers", workers, "worker threads (0: hardware concurrency)");
  }

  // defaults < config file < CRS_SEED < flags
  void resolve(crs::SystemParams& p, crs::PowerSplit& s, crs::SimConfig& sim) const {
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw std::invalid_argument("cannot read config " + config);
      crs::apply_config(crs::read_config(in), {&p, &s, &sim});
    }
    if (const char* env = std::getenv("CRS_SEED"); env && *env) {
      char* end = nullptr;
      const auto v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw std::invalid_argument("CRS_SEED must be an unsigned integer");
      sim.seed = v;
    }
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(p.P, P);
    set(p.sigma2, sigma2);
    set(p.alpha, alpha);
    set(p.r_c, r_c);
    set(p.r_e, r_e);
    set(p.r_0, r_0);
    set(p.K, K);
    set(p.M, M);
    set(p.N, N);
    set(p.F, F);
    set(p.zeta, zeta);
    set(p.xi, xi);
    set(p.u, u);
    if (beta || rho) s = crs::PowerSplit(beta.value_or(s.beta), rho.value_or(s.rho));
    set(sim.seed, seed);
    set(sim.samples, samples);
    set(sim.chunk, chunk);
    set(sim.workers, workers);
    p.validate();
    sim.validate();
  }
};

// "i,j" or "i,j,center|edge|none"
crs::Subcase parse_subcase(const std::string& text, crs::Mode mode, int K) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("subcase must be i,j[,iic]: " + text);
  const int i = std::stoi(parts[0]);
  const int j = std::stoi(parts[1]);
  const auto iic = parts.size() == 3 ? crs::parse_iic_at(parts[2]) : crs::IicAt::None;
  return crs::make_subcase(mode, i, j, iic, K);
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  fn(f);
  if (!f) throw std::runtime_error("write failed for " + path);
}

void print_placement(int K, int M, int N, std::vector<int> demands, bool full) {
  const auto cfg = crs::CCConfig::make(K, M, N);
  const auto map = crs::cc_place(cfg);
  if (demands.empty())
    for (int k = 0; k < K; ++k) demands.push_back(k % N + 1);

  std::cout << "K=" << K << " M=" << M << " N=" << N << " t=" << cfg.t << '\n';
  std::cout << "Lambda_f (" << map.subsets_per_file().size() << " subsets per file):";
  for (const auto& w : map.subsets_per_file()) std::cout << ' ' << crs::format_set(w);
  std::cout << '\n';
  std::cout << "T_{f,i} (same subsets for every file f), stored fraction " << map.fraction_per_file() << ":\n";
  for (int r = 1; r <= K; ++r) {
    std::cout << "  receiver " << r << ':';
    for (const auto& id : map.stored(1, r)) std::cout << ' ' << crs::format_set(id.W);
    std::cout << '\n';
  }
  const auto schedule = crs::cc_delivery_schedule(cfg, demands);
  std::cout << "demands:";
  for (int d : demands) std::cout << ' ' << d;
  std::cout << '\n' << "XOR schedule (" << schedule.size() << " transmissions):\n";
  for (const auto& x : schedule) {
    std::cout << "  " << crs::format_set(x.S) << ':';
    for (std::size_t k = 0; k < x.parts.size(); ++k) std::cout << (k ? " ^ " : " ") << x.parts[k];
    std::cout << '\n';
  }
  const auto load = crs::per_receiver_load(cfg, schedule.size());
  std::cout << "load per receiver: " << crs::format_number(load.value()) << " (" << load << ")\n";
  if (full) {
    std::cout << "placement:\n";
    map.write_text(std::cout);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caching-aided rate splitting: analytic rates, Monte-Carlo oracle and figure data"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "rate sweep over beta, rho, u or P, written as CSV");
  Overrides sweep_ov;
  sweep_ov.attach(sweep);
  std::string var = "beta", scale = "lin", mode = "all-mpc", methods = "analytic", out, trace;
  double from = 0.1, to = 0.9;
  int points = 9;
  bool asymptotic = false;
  std::uint64_t trace_draws = 1000;
  std::vector<std::string> subcase_args;
  sweep->add_option("--var", var, "swept variable")->check(CLI::IsMember({"beta", "rho", "u", "P"}));
  sweep->add_option("--from", from, "first grid value");
  sweep->add_option("--to", to, "last grid value");
  sweep->add_option("--points", points, "grid points (>= 2)");
  sweep->add_option("--scale", scale, "grid spacing")->check(CLI::IsMember({"lin", "log"}));
  sweep->add_option("--mode", mode, "all-mpc, cc-mpc, mpc-cc or all-cc");
  sweep->add_option("--subcase", subcase_args, "restrict to i,j[,iic] (repeatable)");
  sweep->add_option("--methods", methods, "analytic, mc or both")->check(CLI::IsMember({"analytic", "mc", "both"}));
  sweep->add_flag("--asymptotic", asymptotic, "also write infinite-power rows");
  sweep->add_option("--out", out, "output CSV (default stdout)");
  sweep->add_option("--trace", trace, "write per-draw SINRs and branches of the first subcase at the first grid point");
  sweep->add_option("--trace-draws", trace_draws, "draws written by --trace");

  // compare
  auto* compare = app.add_subcommand("compare", "worst analytic-vs-mc z-score of a sweep CSV");
  std::string compare_path;
  compare->add_option("csv", compare_path, "CSV written with --methods both")->required();

  // coverage
  auto* cov = app.add_subcommand("coverage", "closed-form SINR coverage, optionally against Monte Carlo");
  Overrides cov_ov;
  cov_ov.attach(cov);
  std::string kind = "common", cls = "center", cov_methods = "both";
  std::vector<double> ts;
  cov->add_option("--kind", kind, "common, private, private-interf, common-iic, private-iic, private-interf-iic");
  cov->add_option("--class", cls, "center or edge");
  cov->add_option("--t", ts, "SINR thresholds (repeatable)")->required();
  cov->add_option("--methods", cov_methods, "analytic, mc or both")->check(CLI::IsMember({"analytic", "mc", "both"}));

  // placement
  auto* place = app.add_subcommand("placement", "coded-caching placement and XOR delivery schedule");
  int pK = 5, pM = 6, pN = 10;
  std::vector<int> demands;
  bool full = false;
  place->add_option("-K", pK, "receivers");
  place->add_option("-M", pM, "cache size in files");
  place->add_option("-N", pN, "catalog size");
  place->add_option("--demands", demands, "requested file per receiver, comma separated (default 1..K)")->delimiter(',');
  place->add_flag("--full", full, "also print the full placement map");

  // figure
  auto* fig = app.add_subcommand("figure", "CSV data for one of the rate figures");
  Overrides fig_ov;
  fig_ov.attach(fig);
  std::string fig_name, fig_methods = "analytic", fig_out;
  fig->add_option("name", fig_name, "fig3 ... fig9")->required()->check(CLI::IsMember(crs::figure_names()));
  fig->add_option("--methods", fig_methods, "analytic, mc or both")->check(CLI::IsMember({"analytic", "mc", "both"}));
  fig->add_option("--out", fig_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sweep) {
      crs::SweepSpec spec;
      sweep_ov.resolve(spec.params, spec.split, spec.sim);
      spec.var = crs::parse_sweep_var(var);
      spec.from = from;
      spec.to = to;
      spec.points = points;
      spec.log_scale = scale == "log";
      spec.mode = crs::parse_mode(mode);
      spec.methods = crs::parse_methods(methods);
      spec.asymptotic = asymptotic;
      for (const auto& s : subcase_args) spec.subcases.push_back(parse_subcase(s, spec.mode, spec.params.K));
      spec.validate();
      if (!trace.empty()) {
        const auto [p, s] = spec.at(spec.grid().front());
        with_output(trace, [&](std::ostream& os) {
          crs::write_trace(os, spec.selected().front(), p, s, spec.sim.seed, trace_draws);
        });
      }
      with_output(out, [&](std::ostream& os) { crs::run_sweep(spec, os); });
      return kExitOk;
    }
    if (*compare) {
      std::ifstream in(compare_path, std::ios::binary);
      if (!in) throw std::invalid_argument("cannot read " + compare_path);
      const auto report = crs::compare_report(in);
      crs::print_compare_report(report, std::cout);
      return report.pass() ? kExitOk : kExitCompare;
    }
    if (*cov) {
      crs::SystemParams p;
      crs::PowerSplit s;
      crs::SimConfig sim;
      cov_ov.resolve(p, s, sim);
      const auto k = crs::parse_sinr_kind(kind);
      const auto n = crs::parse_receiver_class(cls);
      const auto pw = crs::stream_powers(p.P, s);
      const crs::SinrDistribution dist(k, n, pw, p);
      std::cout << "t,analytic,mc,stderr\n";
      for (double t : ts) {
        if (!(t > 0)) throw std::invalid_argument("coverage thresholds must be positive");
        std::cout << crs::format_number(t) << ',';
        std::cout << (cov_methods != "mc" ? crs::format_number(dist.coverage(t)) : "") << ',';
        if (cov_methods != "analytic") {
          const auto e = crs::estimate_coverage(k, n, t, p, pw, sim);
          std::cout << crs::format_number(e.estimate) << ',' << crs::format_number(e.stderr_);
        } else {
          std::cout << ',';
        }
        std::cout << '\n';
      }
      return kExitOk;
    }
    if (*place) {
      print_placement(pK, pM, pN, demands, full);
      return kExitOk;
    }
    if (*fig) {
      crs::SweepSpec base;
      fig_ov.resolve(base.params, base.split, base.sim);
      base.methods = crs::parse_methods(fig_methods);
      with_output(fig_out, [&](std::ostream& os) { crs::run_figure(fig_name, base, os); });
      return kExitOk;
    }
  } catch (const crs::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const crs::MalformedCsv& e) {
    std::cerr << "malformed CSV: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
