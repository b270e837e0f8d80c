#pragma once

// Stochastic-geometry Monte Carlo oracle. One draw places one center and one
// edge receiver, draws their Rayleigh fading, and applies the decoding rules
// literally; every rate is a conditional mean over the draws where its
// conditioning event occurred.
//
// Draw n always uses Philox counters (n, 0) and (n, 1) under the seed key,
// and draws are grouped into fixed-size chunks whose partial results are
// reduced in chunk order, so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <thread>
#include <utility>
#include <vector>

#include "crs/caching.hpp"
#include "crs/core_model.hpp"
#include "crs/philox.hpp"
#include "crs/rate_analysis.hpp"

namespace crs {

struct SimConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  std::uint64_t chunk = 65536;
  unsigned workers = 0;  // 0: one per hardware thread

  void validate() const {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (chunk < 1) throw std::invalid_argument("chunk size must be >= 1");
  }
};

/// Running count, mean and centered sum of squares; merges are exact in the
/// sense of Chan et al. and applied in a fixed order.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) noexcept {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const auto total = n + o.n;
    const double d = o.mean - mean;
    const double fo = static_cast<double>(o.n) / static_cast<double>(total);
    mean += d * fo;
    m2 += o.m2 + d * d * static_cast<double>(n) * fo;
    n = total;
  }

  double variance() const noexcept { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_of_mean() const noexcept { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

/// Conditional means built from fewer draws than this report an infinite
/// standard error: the sample variance of a handful of rare-event draws says
/// nothing reliable about the spread of the estimator.
inline constexpr std::uint64_t kMinEventsForStderr = 30;

struct ChannelDraw {
  double d_c = 0, d_e = 0;  // distances [m]
  double h_c = 0, h_e = 0;  // unit-mean exponential fading
};

/// Channel realization number `index` of stream `seed`.
inline ChannelDraw draw_channel(const SystemParams& p, std::uint64_t seed, std::uint64_t index) {
  const auto key = Philox4x32::key_from_seed(seed);
  const auto lo = static_cast<std::uint32_t>(index);
  const auto hi = static_cast<std::uint32_t>(index >> 32);
  const auto a = Philox4x32::block({lo, hi, 0u, 0u}, key);
  const auto b = Philox4x32::block({lo, hi, 1u, 0u}, key);
  const double u_c = Philox4x32::to_unit(a[0], a[1]);
  const double u_e = Philox4x32::to_unit(a[2], a[3]);
  const double v_c = Philox4x32::to_unit(b[0], b[1]);
  const double v_e = Philox4x32::to_unit(b[2], b[3]);
  ChannelDraw d;
  d.d_c = p.r_c * std::sqrt(u_c);
  d.d_e = std::sqrt(p.r_e * p.r_e + u_e * (p.r_0 * p.r_0 - p.r_e * p.r_e));
  d.h_c = -std::log(v_c);
  d.h_e = -std::log(v_e);
  return d;
}

/// First `count` receiver distances (d_c, d_e) of stream `seed`.
inline std::vector<std::pair<double, double>> sample_positions(const SystemParams& p, std::uint64_t seed,
                                                               std::size_t count) {
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto d = draw_channel(p, seed, n);
    out.emplace_back(d.d_c, d.d_e);
  }
  return out;
}

namespace detail {

/// Runs body(acc, draw) over all draws chunk by chunk on `workers` threads,
/// then folds chunk results pairwise in chunk order.
template <class Acc, class Body>
Acc run_chunked(const SimConfig& sim, const Acc& init, const Body& body) {
  sim.validate();
  const std::uint64_t chunks = (sim.samples + sim.chunk - 1) / sim.chunk;
  std::vector<Acc> parts(static_cast<std::size_t>(chunks), init);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t begin = c * sim.chunk;
      const std::uint64_t end = std::min(sim.samples, begin + sim.chunk);
      Acc& acc = parts[static_cast<std::size_t>(c)];
      for (std::uint64_t n = begin; n < end; ++n) body(acc, n);
    }
  };
  unsigned workers = sim.workers ? sim.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t width = 1; width < parts.size(); width *= 2)
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) parts[i].merge(parts[i + width]);
  return parts.empty() ? init : parts.front();
}

}  // namespace detail

struct CoverageEstimate {
  double estimate = 0;
  double stderr_ = 0;
};

/// Fraction of draws with SINR above t.
inline CoverageEstimate estimate_coverage(SinrKind kind, ReceiverClass n, double t, const SystemParams& params,
                                          const StreamPowers& pw, const SimConfig& sim) {
  const auto m = detail::run_chunked(sim, Moments{}, [&](Moments& acc, std::uint64_t i) {
    const auto d = draw_channel(params, sim.seed, i);
    const double L = n == ReceiverClass::Center ? channel_gain(d.h_c, d.d_c, params.alpha)
                                                : channel_gain(d.h_e, d.d_e, params.alpha);
    acc.add(instantaneous_sinr(kind, n, pw, L, params.sigma2) > t ? 1.0 : 0.0);
  });
  return {m.mean, m.stderr_of_mean()};
}

/// All six SINRs and their log rates for both receivers of one draw.
struct DrawSinrs {
  std::array<std::array<double, 6>, 2> eta{};  // [class][kind]
  std::array<std::array<double, 6>, 2> log_rate{};

  double at(ReceiverClass n, SinrKind k) const noexcept {
    return eta[n == ReceiverClass::Center ? 0 : 1][static_cast<std::size_t>(k)];
  }
  double rate(ReceiverClass n, SinrKind k) const noexcept {
    return log_rate[n == ReceiverClass::Center ? 0 : 1][static_cast<std::size_t>(k)];
  }
};

inline DrawSinrs draw_sinrs(const ChannelDraw& d, const SystemParams& p, const StreamPowers& pw) {
  DrawSinrs s;
  for (auto n : {ReceiverClass::Center, ReceiverClass::Edge}) {
    const bool c = n == ReceiverClass::Center;
    const double L = channel_gain(c ? d.h_c : d.h_e, c ? d.d_c : d.d_e, p.alpha);
    auto& row = s.eta[c ? 0 : 1];
    auto& lr = s.log_rate[c ? 0 : 1];
    for (auto k : kAllSinrKinds) {
      const auto i = static_cast<std::size_t>(k);
      row[i] = instantaneous_sinr(k, n, pw, L, p.sigma2);
      lr[i] = std::log2(1.0 + row[i]);
    }
  }
  return s;
}

/// Per-subcase constants needed to score a draw.
struct SubcaseScoring {
  Subcase subcase;
  std::array<double, 2> omega{};
  std::array<double, 2> threshold{};
  double zeta = 0;
  double u = 0.5;

  SubcaseScoring(const Subcase& sc, const SystemParams& p) : subcase(sc), zeta(p.zeta), u(p.u) {
    omega = {prelog_factor(sc.i, p.K, p.M, p.N), prelog_factor(sc.j, p.K, p.M, p.N)};
    threshold = {private_threshold(omega[0], p.xi), private_threshold(omega[1], p.xi)};
  }
};

/// Decoding path of one receiver in one draw.
enum class DecodePath { None = 0, CommonOnly = 1, CommonAndPrivate = 2, PrivateUnderCommon = 3 };

struct ReceiverOutcome {
  bool common = false;       // s0 decoded
  bool priv = false;         // s_n decoded after s0
  bool priv_interf = false;  // s_n decoded with s0 undecoded
  bool active = false;       // s0 decoded, or s_n decodable under s0
  double common_log = 0;     // log2(1 + common SINR)
  double share = 0;          // common-stream rate credited to the receiver
  double rp = 0, rpi = 0;
  double total = 0;
  DecodePath path = DecodePath::None;
};

struct DrawOutcome {
  std::array<ReceiverOutcome, 2> rx;
  bool both = false;
  double min_common = 0;  // min of the two common log rates when both decode
};

/// Applies the decoding rules of one subcase to one draw.
inline DrawOutcome score_draw(const DrawSinrs& s, const SubcaseScoring& sc) {
  DrawOutcome out;
  std::array<double, 2> common_rate{};
  for (int c = 0; c < 2; ++c) {
    const auto n = c == 0 ? ReceiverClass::Center : ReceiverClass::Edge;
    const auto kinds = receiver_kinds(n, sc.subcase.iic_at);
    out.rx[c].common = s.at(n, kinds.common) > sc.zeta;
    common_rate[c] = s.rate(n, kinds.common);
    out.rx[c].common_log = common_rate[c];
  }
  out.both = out.rx[0].common && out.rx[1].common;
  out.min_common = out.both ? std::min(common_rate[0], common_rate[1]) : 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto n = c == 0 ? ReceiverClass::Center : ReceiverClass::Edge;
    const auto kinds = receiver_kinds(n, sc.subcase.iic_at);
    auto& r = out.rx[c];
    const double w = sc.omega[c];
    const double xi = sc.threshold[c];
    const bool pi_ok = s.at(n, kinds.priv_interf) > xi;
    if (r.common) {
      const double part = c == 0 ? sc.u : 1.0 - sc.u;
      r.share = out.both ? w * part * out.min_common : w * common_rate[c];
      r.priv = s.at(n, kinds.priv) > xi;
      r.rp = r.priv ? w * s.rate(n, kinds.priv) : 0.0;
      r.total = r.share + r.rp;
      r.path = r.priv ? DecodePath::CommonAndPrivate : DecodePath::CommonOnly;
    } else if (pi_ok) {
      r.priv_interf = true;
      r.rpi = w * s.rate(n, kinds.priv_interf);
      r.total = r.rpi;
      r.path = DecodePath::PrivateUnderCommon;
    }
    r.active = r.common || pi_ok;
  }
  return out;
}

namespace detail {

struct RateAccumulator {
  std::array<Moments, kRateFieldCount> m{};

  void merge(const RateAccumulator& o) noexcept {
    for (std::size_t i = 0; i < m.size(); ++i) m[i].merge(o.m[i]);
  }

  Moments& operator[](RateField f) noexcept { return m[static_cast<std::size_t>(f)]; }

  void add(const DrawOutcome& o) noexcept {
    if (o.both) (*this)[RateField::R0Both].add(o.min_common);
    for (int c = 0; c < 2; ++c) {
      const auto n = c == 0 ? ReceiverClass::Center : ReceiverClass::Edge;
      const auto& r = o.rx[c];
      if (r.common && !o.rx[1 - c].common)
        (*this)[n == ReceiverClass::Center ? RateField::R0CenterOnly : RateField::R0EdgeOnly].add(r.common_log);
      if (r.common) (*this)[field_for(n, RateField::Rs0Center)].add(r.share);
      if (r.common && r.priv) (*this)[field_for(n, RateField::RpCenter)].add(r.rp);
      if (r.priv_interf) (*this)[field_for(n, RateField::RpICenter)].add(r.rpi);
      if (r.active) (*this)[field_for(n, RateField::RCenter)].add(r.total);
      (*this)[field_for(n, RateField::QCenter)].add(r.active ? 1.0 : 0.0);
    }
    if (o.rx[0].active || o.rx[1].active) (*this)[RateField::RSum].add(o.rx[0].total + o.rx[1].total);
  }
};

}  // namespace detail

/// Monte Carlo reports for several subcases sharing the same draws.
inline std::vector<RateReport> estimate_rates(const std::vector<Subcase>& subcases, const SystemParams& params,
                                              const PowerSplit& split, const SimConfig& sim) {
  params.validate();
  const auto pw = stream_powers(params.P, split);
  std::vector<SubcaseScoring> scoring;
  for (const auto& sc : subcases) {
    sc.validate(params.K);
    scoring.emplace_back(sc, params);
  }

  struct Batch {
    std::vector<detail::RateAccumulator> acc;
    void merge(const Batch& o) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i].merge(o.acc[i]);
    }
  };
  Batch init{std::vector<detail::RateAccumulator>(subcases.size())};
  const auto total = detail::run_chunked(sim, init, [&](Batch& b, std::uint64_t i) {
    const auto s = draw_sinrs(draw_channel(params, sim.seed, i), params, pw);
    for (std::size_t k = 0; k < scoring.size(); ++k) b.acc[k].add(score_draw(s, scoring[k]));
  });

  std::vector<RateReport> out;
  for (std::size_t k = 0; k < subcases.size(); ++k) {
    RateReport r;
    r.method = RateMethod::MonteCarlo;
    for (std::size_t f = 0; f < kRateFieldCount; ++f) {
      const auto& m = total.acc[k].m[f];
      r.value[f] = m.n ? m.mean : 0.0;
      r.stderr_[f] = m.n >= kMinEventsForStderr ? m.stderr_of_mean() : kInf;
      r.empty[f] = m.n == 0;
      r.events[f] = m.n;
    }
    // q fields average an indicator over every draw, so they are never empty.
    for (const auto q : {RateField::QCenter, RateField::QEdge}) {
      const auto& m = total.acc[k].m[static_cast<std::size_t>(q)];
      r.empty[static_cast<std::size_t>(q)] = false;
      r.stderr_[static_cast<std::size_t>(q)] = m.stderr_of_mean();
    }
    out.push_back(r);
  }
  return out;
}

inline RateReport estimate_rates(const Subcase& sc, const SystemParams& params, const PowerSplit& split,
                                 const SimConfig& sim) {
  return estimate_rates(std::vector<Subcase>{sc}, params, split, sim).front();
}

/// Per-draw debug dump of the first `limit` draws for one subcase.
inline void write_trace(std::ostream& os, const Subcase& sc, const SystemParams& params, const PowerSplit& split,
                        std::uint64_t seed, std::uint64_t limit) {
  const auto pw = stream_powers(params.P, split);
  const SubcaseScoring scoring(sc, params);
  os << "draw,d_c,d_e,h_c,h_e,sinr_c0,sinr_e0,sinr_cp,sinr_ep,sinr_cpI,sinr_epI,branch_c,branch_e\n";
  const auto kc = receiver_kinds(ReceiverClass::Center, sc.iic_at);
  const auto ke = receiver_kinds(ReceiverClass::Edge, sc.iic_at);
  char buf[512];
  for (std::uint64_t i = 0; i < limit; ++i) {
    const auto d = draw_channel(params, seed, i);
    const auto s = draw_sinrs(d, params, pw);
    const auto o = score_draw(s, scoring);
    std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d\n",
                  static_cast<unsigned long long>(i), d.d_c, d.d_e, d.h_c, d.h_e,
                  s.at(ReceiverClass::Center, kc.common), s.at(ReceiverClass::Edge, ke.common),
                  s.at(ReceiverClass::Center, kc.priv), s.at(ReceiverClass::Edge, ke.priv),
                  s.at(ReceiverClass::Center, kc.priv_interf), s.at(ReceiverClass::Edge, ke.priv_interf),
                  static_cast<int>(o.rx[0].path), static_cast<int>(o.rx[1].path));
    os << buf;
  }
}

}  // namespace crs
