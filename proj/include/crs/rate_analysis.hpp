#pragma once

// Conditional achieved rates of the typical center and edge receivers:
// common-stream rates, private-stream rates after and under the common
// stream, per-receiver rates with and without IIC, the normalized sum rate
// and the infinite-power limits.
//
// Every decoding event is a threshold on the receiver's channel gain L, so
// branch selection compares the gain thresholds s(t) of the events involved
// instead of the equivalent ratios of bounds. This stays well defined when
// some bounds are zero or infinite.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "crs/caching.hpp"
#include "crs/core_model.hpp"
#include "crs/sinr_distributions.hpp"

namespace crs {

enum class RateField {
  R0Both,
  R0CenterOnly,
  R0EdgeOnly,
  Rs0Center,
  Rs0Edge,
  RpCenter,
  RpEdge,
  RpICenter,
  RpIEdge,
  RCenter,
  REdge,
  RSum,
  QCenter,
  QEdge,
};

inline constexpr std::size_t kRateFieldCount = 14;

constexpr std::string_view to_string(RateField f) noexcept {
  constexpr std::array<std::string_view, kRateFieldCount> names = {
      "R0_both", "R0_center_only", "R0_edge_only", "Rs0_center", "Rs0_edge", "Rp_center", "Rp_edge",
      "RpI_center", "RpI_edge", "R_center", "R_edge", "R_sum", "q_center", "q_edge"};
  return names[static_cast<std::size_t>(f)];
}

enum class RateMethod { Analytic, MonteCarlo };

constexpr std::string_view to_string(RateMethod m) noexcept {
  return m == RateMethod::Analytic ? "analytic" : "mc";
}

struct RateReport {
  RateMethod method = RateMethod::Analytic;
  std::array<double, kRateFieldCount> value{};
  std::array<double, kRateFieldCount> stderr_{};  // zero for analytic reports
  std::array<bool, kRateFieldCount> empty{};      // conditioning event has probability 0
  std::array<std::uint64_t, kRateFieldCount> events{};  // draws in the conditioning event (mc only)

  double operator[](RateField f) const noexcept { return value[static_cast<std::size_t>(f)]; }
  double& operator[](RateField f) noexcept { return value[static_cast<std::size_t>(f)]; }
  double error(RateField f) const noexcept { return stderr_[static_cast<std::size_t>(f)]; }
  bool is_empty(RateField f) const noexcept { return empty[static_cast<std::size_t>(f)]; }
  std::uint64_t event_count(RateField f) const noexcept { return events[static_cast<std::size_t>(f)]; }

  double R_center() const noexcept { return (*this)[RateField::RCenter]; }
  double R_edge() const noexcept { return (*this)[RateField::REdge]; }
  double R_sum() const noexcept { return (*this)[RateField::RSum]; }
  double q_center() const noexcept { return (*this)[RateField::QCenter]; }
  double q_edge() const noexcept { return (*this)[RateField::QEdge]; }
};

inline constexpr RateField field_for(ReceiverClass n, RateField center_field) noexcept {
  return n == ReceiverClass::Center ? center_field : static_cast<RateField>(static_cast<int>(center_field) + 1);
}

/// SINR kinds used by receiver n when IIC is located at `iic`.
struct ReceiverKinds {
  SinrKind common;
  SinrKind priv;
  SinrKind priv_interf;
};

constexpr ReceiverKinds receiver_kinds(ReceiverClass n, IicAt iic) noexcept {
  if (iic_applies(iic, n))
    return {SinrKind::CommonIIC, SinrKind::PrivateIIC, SinrKind::PrivateWithInterferenceIIC};
  return {SinrKind::Common, SinrKind::Private, SinrKind::PrivateWithInterference};
}

/// Theorem branch that produced a per-receiver rate.
enum class RateBranch {
  Outage = 0,             // no stream decodable
  CommonPrivatePartial,   // s0 decoded; s_n decoded on part of that event
  CommonPrivateFull,      // s0 decoded; s_n always decoded with it
  Mixed,                  // s0 + s_n, or s_n under s0 when s0 fails
  PrivateUnderCommon,     // s0 never decodable
};

struct AchievedRate {
  double value = 0;
  double q = 0;  // probability that the rate is non-zero
  RateBranch branch = RateBranch::Outage;
};

struct SumRate {
  double value = 0;
  double q_center = 0;
  double q_edge = 0;
  bool empty = false;
};

/// Common-stream quantities for one IIC location (all with pre-log 1).
struct CommonTerms {
  double pi_center = 0;  // coverage of the center common SINR at zeta
  double pi_edge = 0;
  double both = 0;         // rate when both receivers decode s0
  double center_only = 0;  // rate of the center receiver given it decodes s0
  double edge_only = 0;

  double pi(ReceiverClass n) const noexcept { return n == ReceiverClass::Center ? pi_center : pi_edge; }
  double single(ReceiverClass n) const noexcept { return n == ReceiverClass::Center ? center_only : edge_only; }
};

class RateAnalyzer {
 public:
  RateAnalyzer(const SystemParams& params, const PowerSplit& split, double rel_tol = 1e-9)
      : params_(params), split_(split), powers_(stream_powers(params.P, split)), rel_tol_(rel_tol) {
    params_.validate();
  }

  const SystemParams& params() const noexcept { return params_; }
  const PowerSplit& split() const noexcept { return split_; }
  const StreamPowers& powers() const noexcept { return powers_; }

  SinrDistribution dist(SinrKind kind, ReceiverClass n) const { return {kind, n, powers_, params_}; }

  double omega(int index) const { return prelog_factor(index, params_.K, params_.M, params_.N); }
  double threshold(int index) const { return private_threshold(omega(index), params_.xi); }

  /// int_zeta R(1,t) g(t) dt / pi(zeta) for the common SINR of n.
  double common_rate_single(ReceiverClass n, bool iic) const {
    const auto d = dist(iic ? SinrKind::CommonIIC : SinrKind::Common, n);
    const double pi = d.coverage(params_.zeta);
    if (!(pi > 0)) return 0.0;
    return d.expect(log_rate, params_.zeta, Limit::bound(), rel_tol_) / pi;
  }

  /// E[min(R(1,x), R(1,y)) | both decode] by iterated integration over the
  /// regions x < y and y < x; the inner upper limit is min(outer, bound).
  double common_rate_both(IicAt iic) const {
    const auto dx = dist(receiver_kinds(ReceiverClass::Center, iic).common, ReceiverClass::Center);
    const auto dy = dist(receiver_kinds(ReceiverClass::Edge, iic).common, ReceiverClass::Edge);
    const double zeta = params_.zeta;
    const double pix = dx.coverage(zeta);
    const double piy = dy.coverage(zeta);
    if (!(pix > 0 && piy > 0)) return 0.0;
    const double inner_tol = rel_tol_;
    const double outer_tol = std::max(rel_tol_, 1e-8);
    // Integral of R g_inner from zeta up to the outer point (t, gap to the outer bound).
    auto inner = [&](const SinrDistribution& in, const SinrDistribution& out) {
      return [in = &in, out = &out, zeta, inner_tol, bound_diff = in.theta() - out.theta()](double t, double gap_out) {
        Limit hi;
        if (!in->spec().bounded()) {
          hi = {t, kInf, false};
        } else if (!(t < in->theta())) {
          hi = Limit::bound();
        } else {
          const double g = out->spec().bounded() ? bound_diff + gap_out : in->theta() - t;
          hi = g > 0 ? Limit{t, g, false} : Limit::bound();
        }
        return in->expect(log_rate, zeta, hi, inner_tol);
      };
    };
    const double num = dy.expect(inner(dx, dy), zeta, Limit::bound(), outer_tol) +
                       dx.expect(inner(dy, dx), zeta, Limit::bound(), outer_tol);
    return num / (pix * piy);
  }

  CommonTerms common_terms(IicAt iic) const {
    CommonTerms c;
    const double zeta = params_.zeta;
    c.pi_center = dist(receiver_kinds(ReceiverClass::Center, iic).common, ReceiverClass::Center).coverage(zeta);
    c.pi_edge = dist(receiver_kinds(ReceiverClass::Edge, iic).common, ReceiverClass::Edge).coverage(zeta);
    c.both = common_rate_both(iic);
    c.center_only = common_rate_single(ReceiverClass::Center, iic_applies(iic, ReceiverClass::Center));
    c.edge_only = common_rate_single(ReceiverClass::Edge, iic_applies(iic, ReceiverClass::Edge));
    return c;
  }

  /// Expected common-stream share of receiver n given it decodes s0.
  double common_stream_rate(ReceiverClass n, int omega_index, IicAt iic) const {
    return common_stream_rate(n, omega_index, common_terms(iic));
  }

  double common_stream_rate(ReceiverClass n, int omega_index, const CommonTerms& c) const {
    if (!(c.pi(n) > 0)) return 0.0;
    const double w = omega(omega_index);
    const double share = n == ReceiverClass::Center ? params_.u : 1.0 - params_.u;
    const double pk = c.pi(other(n));
    return pk * w * share * c.both + (1.0 - pk) * w * c.single(n);
  }

  /// Rate of s_n given s0 was decoded (two-branch form).
  double private_rate_after_common(ReceiverClass n, int omega_index, bool iic) const {
    return private_terms(n, omega_index, iic).Rp;
  }

  /// Rate of s_n given s0 was not decoded.
  double private_rate_with_interference(ReceiverClass n, int omega_index, bool iic) const {
    return private_terms(n, omega_index, iic).RpI;
  }

  AchievedRate achieved_rate(ReceiverClass n, int omega_index, IicAt iic) const {
    return achieved_rate(n, omega_index, iic, common_terms(iic));
  }

  AchievedRate achieved_rate(ReceiverClass n, int omega_index, IicContext ctx) const {
    return achieved_rate(n, omega_index, iic_location(ctx, n));
  }

  AchievedRate achieved_rate(ReceiverClass n, int omega_index, IicAt iic, const CommonTerms& c) const {
    const auto pt = private_terms(n, omega_index, iic_applies(iic, n));
    return combine(pt, common_stream_rate(n, omega_index, c));
  }

  /// Branch of the achieved-rate formula, without evaluating any integral.
  RateBranch branch(ReceiverClass n, int omega_index, IicAt iic) const {
    return combine(private_terms(n, omega_index, iic_applies(iic, n), false), 0.0).branch;
  }

  /// Probability that receiver n's rate is non-zero.
  double q(ReceiverClass n, int omega_index, IicAt iic) const {
    return combine(private_terms(n, omega_index, iic_applies(iic, n), false), 0.0).q;
  }

  SumRate sum_rate(const Subcase& sc) const { return sum_from(report(sc)); }

  RateReport report(const Subcase& sc) const {
    sc.validate(params_.K);
    const auto c = common_terms(sc.iic_at);
    RateReport r;
    r.method = RateMethod::Analytic;
    r[RateField::R0Both] = c.both;
    r.empty[static_cast<std::size_t>(RateField::R0Both)] = !(c.pi_center > 0 && c.pi_edge > 0);
    r[RateField::R0CenterOnly] = c.center_only;
    r[RateField::R0EdgeOnly] = c.edge_only;
    r.empty[static_cast<std::size_t>(RateField::R0CenterOnly)] = !(c.pi_center > 0);
    r.empty[static_cast<std::size_t>(RateField::R0EdgeOnly)] = !(c.pi_edge > 0);
    AchievedRate ar[2];
    for (auto n : {ReceiverClass::Center, ReceiverClass::Edge}) {
      const int idx = sc.index(n);
      const auto pt = private_terms(n, idx, iic_applies(sc.iic_at, n));
      const double rs0 = common_stream_rate(n, idx, c);
      const auto a = combine(pt, rs0);
      ar[n == ReceiverClass::Center ? 0 : 1] = a;
      set(r, field_for(n, RateField::Rs0Center), rs0, !(c.pi(n) > 0));
      set(r, field_for(n, RateField::RpCenter), pt.Rp, pt.Rp_empty);
      set(r, field_for(n, RateField::RpICenter), pt.RpI, pt.RpI_empty);
      set(r, field_for(n, RateField::RCenter), a.value, !(a.q > 0));
      set(r, field_for(n, RateField::QCenter), a.q, false);
    }
    const auto s = combine_sum(ar[0], ar[1]);
    set(r, RateField::RSum, s.value, s.empty);
    return r;
  }

  /// Theorem-3 combination (q_c R_c + q_e R_e) / (q_c + q_e - q_c q_e).
  static SumRate combine_sum(const AchievedRate& c, const AchievedRate& e) {
    SumRate s{0.0, c.q, e.q, false};
    const double den = c.q + e.q - c.q * e.q;
    if (!(den > 0)) {
      s.empty = true;
      return s;
    }
    s.value = (c.q * c.value + e.q * e.value) / den;
    return s;
  }

 private:
  static double log_rate(double t) { return std::log2(1.0 + t); }

  static SumRate sum_from(const RateReport& r) {
    return {r.R_sum(), r.q_center(), r.q_edge(), r.is_empty(RateField::RSum)};
  }

  static void set(RateReport& r, RateField f, double v, bool empty) {
    r[f] = v;
    r.empty[static_cast<std::size_t>(f)] = empty;
  }

  // Gain threshold of the event {eta > t}; +inf when the event is impossible.
  static double gain_threshold(const SinrDistribution& d, double t) {
    if (d.spec().vanishes() || !(t < d.theta())) return kInf;
    return d.s_value(t);
  }

  struct PrivateTerms {
    double s0 = kInf, sp = kInf, spi = kInf;  // gain thresholds of the three events
    double pi0 = 0, pip = 0, pipi = 0;        // their probabilities
    double Rp = 0, RpI = 0;
    bool Rp_empty = true, RpI_empty = true;
  };

  PrivateTerms private_terms(ReceiverClass n, int omega_index, bool iic, bool with_rates = true) const {
    const auto kinds = receiver_kinds(n, iic ? (n == ReceiverClass::Center ? IicAt::Center : IicAt::Edge) : IicAt::None);
    const auto d0 = dist(kinds.common, n);
    const auto dp = dist(kinds.priv, n);
    const auto dpi = dist(kinds.priv_interf, n);
    const double zeta = params_.zeta;
    const double w = omega(omega_index);
    const double xi = private_threshold(w, params_.xi);
    auto rate = [w](double t) { return w * std::log2(1.0 + t); };

    PrivateTerms p;
    p.s0 = gain_threshold(d0, zeta);
    p.sp = gain_threshold(dp, xi);
    p.spi = gain_threshold(dpi, xi);
    p.pi0 = d0.coverage(zeta);
    p.pip = dp.coverage(xi);
    p.pipi = dpi.coverage(xi);
    if (!(p.pi0 > 0)) p.s0 = kInf;  // decoding probability underflowed
    if (!with_rates) return p;

    // Noise level sigma2 / L at which the common SINR equals zeta.
    const double x0 = p.s0 < kInf ? d0.spec().A / zeta - d0.spec().B : 0.0;

    if (p.s0 < kInf && p.sp < kInf) {
      if (p.sp >= p.s0) {
        if (p.pip > 0) {
          p.Rp = dp.expect(rate, xi, Limit::bound(), rel_tol_) / p.pip;
          p.Rp_empty = false;
        }
      } else {
        p.Rp = dp.expect(rate, dp.point_at_noise(x0), Limit::bound(), rel_tol_) / p.pi0;
        p.Rp_empty = false;
      }
    }

    if (p.spi < kInf) {
      if (p.s0 == kInf) {
        if (p.pipi > 0) {
          p.RpI = dpi.expect(rate, xi, Limit::bound(), rel_tol_) / p.pipi;
          p.RpI_empty = false;
        }
      } else if (p.spi < p.s0) {
        const double den = p.pipi - p.pi0;
        if (den > 0) {
          p.RpI = dpi.expect(rate, dpi.point(xi), dpi.point_at_noise(x0), rel_tol_) / den;
          p.RpI_empty = false;
        }
      }
    }
    return p;
  }

  static AchievedRate combine(const PrivateTerms& p, double rs0) {
    AchievedRate a;
    if (p.s0 == kInf) {
      if (p.spi < kInf && p.pipi > 0) {
        a.value = p.RpI;
        a.q = p.pipi;
        a.branch = RateBranch::PrivateUnderCommon;
      }
      return a;
    }
    if (p.spi >= p.s0) {
      a.q = p.pi0;
      if (p.sp >= p.s0) {
        a.value = rs0 + (p.pip / p.pi0) * p.Rp;
        a.branch = RateBranch::CommonPrivatePartial;
      } else {
        a.value = rs0 + p.Rp;
        a.branch = RateBranch::CommonPrivateFull;
      }
      return a;
    }
    const double w = p.pi0 / p.pipi;
    a.q = p.pipi;
    a.value = w * (rs0 + p.Rp) + (1.0 - w) * p.RpI;
    a.branch = RateBranch::Mixed;
    return a;
  }

  SystemParams params_;
  PowerSplit split_;
  StreamPowers powers_;
  double rel_tol_;
};

/// Analytic report for one subcase.
inline RateReport mode_evaluate(const Subcase& sc, const SystemParams& params, const PowerSplit& split) {
  return RateAnalyzer(params, split).report(sc);
}

inline SumRate sum_rate(const Subcase& sc, const SystemParams& params, const PowerSplit& split) {
  const auto r = mode_evaluate(sc, params, split);
  return {r.R_sum(), r.q_center(), r.q_edge(), r.is_empty(RateField::RSum)};
}

/// Infinite-power limit of a rate; `unbounded` marks a rate growing without limit.
struct AsymptoticRate {
  bool unbounded = false;
  double value = 0;
};

inline AsymptoticRate asymptotic_rate(ReceiverClass n, int omega_index, const SystemParams& params,
                                      const PowerSplit& split, IicContext ctx) {
  const auto pw = stream_powers(params.P, split);
  const auto th = theta_set(n, pw);
  const double w = prelog_factor(omega_index, params.K, params.M, params.N);
  const double xi = private_threshold(w, params.xi);
  const double zeta = params.zeta;
  auto R = [w](double t) { return w * std::log2(1.0 + t); };
  AsymptoticRate out;
  if (ctx == IicContext::Self) {
    if (zeta < th.theta4) return {true, kInf};
    const double inv = th.inverse_theta4();
    if (th.theta4 < zeta && inv > xi) out.value = R(inv);
  } else {
    const double share = n == ReceiverClass::Center ? params.u : 1.0 - params.u;
    if (th.theta1 > zeta) out.value = share * R(th.theta1) + (th.theta2 > xi ? R(th.theta2) : 0.0);
    if (th.theta1 < zeta && th.theta3 > xi) out.value = R(th.theta3);
  }
  out.unbounded = std::isinf(out.value);
  return out;
}

inline AsymptoticRate asymptotic_sum_rate(const Subcase& sc, const SystemParams& params, const PowerSplit& split) {
  const auto c = asymptotic_rate(ReceiverClass::Center, sc.i, params, split, iic_context(sc.iic_at, ReceiverClass::Center));
  const auto e = asymptotic_rate(ReceiverClass::Edge, sc.j, params, split, iic_context(sc.iic_at, ReceiverClass::Edge));
  if (c.unbounded || e.unbounded) return {true, kInf};
  return {false, c.value + e.value};
}

}  // namespace crs
