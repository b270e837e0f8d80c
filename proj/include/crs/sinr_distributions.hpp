#pragma once

// Closed-form SINR distributions for a receiver uniformly placed in a disk
// (center class) or annulus (edge class) under Rayleigh fading.
//
// Every SINR kind has the form eta = A / (B + sigma2 / L), so eta > t exactly
// when L > s(t) = sigma2 t / (A - B t), and the coverage probability is
// E_d[exp(-s (1 + d^alpha))]. The bound theta = A / B is where s has its pole.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "crs/core_model.hpp"
#include "crs/quadrature.hpp"
#include "crs/special_functions.hpp"

namespace crs {

/// Parameters of one SINR distribution (one column of the distribution table).
struct DistSpec {
  SinrKind kind = SinrKind::Common;
  ReceiverClass cls = ReceiverClass::Center;
  double A = 0;       // signal power
  double B = 0;       // interference power not scaled by the channel
  double theta = 0;   // upper bound of the SINR (+inf when B == 0)
  double sigma2 = 0;

  bool vanishes() const noexcept { return A == 0.0; }
  bool bounded() const noexcept { return B > 0.0; }
};

inline DistSpec dist_spec(SinrKind kind, ReceiverClass n, const StreamPowers& pw, double sigma2) {
  const double pn = pw.own(n);
  const double pk = pw.cross(n);
  DistSpec d;
  d.kind = kind;
  d.cls = n;
  d.sigma2 = sigma2;
  switch (kind) {
    case SinrKind::Common: d.A = pw.p0; d.B = pn + pk; break;
    case SinrKind::Private: d.A = pn; d.B = pk; break;
    case SinrKind::PrivateWithInterference: d.A = pn; d.B = pw.p0 + pk; break;
    case SinrKind::CommonIIC: d.A = pw.p0; d.B = pn; break;
    case SinrKind::PrivateIIC: d.A = pn; d.B = 0.0; break;
    case SinrKind::PrivateWithInterferenceIIC: d.A = pn; d.B = pw.p0; break;
  }
  d.theta = detail::bound_ratio(d.A, d.B);
  return d;
}

/// Radial placement law of a receiver class.
struct Geometry {
  double alpha = 4;
  double inner = 0;  // 0 for the center disk
  double outer = 0;

  static Geometry of(ReceiverClass n, const SystemParams& p) {
    return n == ReceiverClass::Center ? Geometry{p.alpha, 0.0, p.r_c} : Geometry{p.alpha, p.r_e, p.r_0};
  }
  double area_factor() const noexcept { return outer * outer - inner * inner; }
};

/// Pole of s(t) reached at this many nats: e^{-s} underflows beyond it.
inline constexpr double kSaturatedS = 745.0;

namespace detail {

struct DistributionCore {
  Geometry geo;
  double a = 0.5;  // 2 / alpha
  double in_pow = 0, out_pow = 0;

  explicit DistributionCore(const Geometry& g)
      : geo(g), a(2.0 / g.alpha), in_pow(std::pow(g.inner, g.alpha)), out_pow(std::pow(g.outer, g.alpha)) {}

  double gamma_span(double s) const {
    return special::lower_gamma_diff(a, s * in_pow, s * out_pow);
  }

  // P[L > s] averaged over the class's distance law.
  double coverage_at_s(double s) const {
    if (!(s < kSaturatedS)) return 0.0;
    if (s <= 0.0) return 1.0;
    const double c = 2.0 * std::exp(-s) / (geo.alpha * geo.area_factor() * std::pow(s, a)) * gamma_span(s);
    return std::min(1.0, std::max(0.0, c));
  }

  // s^{-2/alpha} (s + 2/alpha) [gamma span] - [r^2 e^{-s r^alpha}] over the radii.
  double pdf_bracket(double s) const {
    const double edge_terms = geo.outer * geo.outer * std::exp(-s * out_pow) -
                              (geo.inner > 0 ? geo.inner * geo.inner * std::exp(-s * in_pow) : 0.0);
    return std::pow(s, -a) * (s + a) * gamma_span(s) - edge_terms;
  }

  // Common prefactor 2 e^{-s} / (alpha W).
  double pdf_prefactor(double s) const {
    return 2.0 * std::exp(-s) / (geo.alpha * geo.area_factor());
  }
};

}  // namespace detail

/// Integration limit: the point t together with its distance to theta,
/// carried separately so limits hugging the pole keep full precision.
struct Limit {
  double t = 0;
  double gap = kInf;       // theta - t; +inf for unbounded supports
  bool at_bound = false;   // the open end theta^- (or +inf)

  static Limit bound() {
    Limit l;
    l.at_bound = true;
    l.gap = 0;
    return l;
  }
};

/// One SINR distribution bound to the receiver geometry.
class SinrDistribution {
 public:
  SinrDistribution(const DistSpec& spec, const SystemParams& params)
      : spec_(spec), core_(Geometry::of(spec.cls, params)) {}
  SinrDistribution(SinrKind kind, ReceiverClass n, const StreamPowers& pw, const SystemParams& params)
      : SinrDistribution(dist_spec(kind, n, pw, params.sigma2), params) {}

  const DistSpec& spec() const noexcept { return spec_; }
  double theta() const noexcept { return spec_.theta; }

  /// Channel-gain threshold s(t); +inf when the stream carries no power.
  double s_value(double t) const {
    if (!(t > 0)) throw std::domain_error("SINR threshold must be positive");
    if (spec_.vanishes()) return kInf;
    if (!(t < spec_.theta)) throw std::domain_error("threshold outside the SINR support");
    const double den = spec_.A - spec_.B * t;
    return den > 0 ? spec_.sigma2 * t / den : kInf;
  }

  double coverage(double t) const {
    if (!(t > 0)) return 1.0;
    if (spec_.vanishes() || !(t < spec_.theta)) return 0.0;
    return core_.coverage_at_s(s_value(t));
  }

  /// Density of the SINR: the derivative of 1 - coverage.
  double pdf(double t) const {
    if (!(t > 0) || spec_.vanishes() || !(t < spec_.theta)) return 0.0;
    const double s = s_value(t);
    if (!(s < kSaturatedS)) return 0.0;
    const double shape = spec_.bounded() ? t * (1.0 - t / spec_.theta) : t;
    return core_.pdf_prefactor(s) * core_.pdf_bracket(s) / shape;
  }

  Limit point(double t) const { return {t, spec_.bounded() ? spec_.theta - t : kInf, false}; }

  /// SINR value reached when the noise term sigma2 / L equals x.
  Limit point_at_noise(double x) const {
    if (!spec_.bounded()) return {spec_.A / x, kInf, false};
    const double B = spec_.B;
    return {spec_.A / (B + x), spec_.A * x / (B * (B + x)), false};
  }

  /// int_lo^hi f(t) g(t) dt. Bounded supports integrate in v = -log(gap) so
  /// the pole at theta is pushed to infinity; unbounded ones in log t.
  template <class F>
  double expect(const F& f, Limit lo, Limit hi = Limit::bound(), double rel_tol = 1e-9) const {
    if (spec_.vanishes() || lo.at_bound || !(lo.t > 0) || !(lo.t < spec_.theta)) return 0.0;
    if (!hi.at_bound && !(hi.t > lo.t)) return 0.0;
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    opt.initial_pieces = 16;
    const double sigma2 = spec_.sigma2;

    if (spec_.bounded()) {
      const double theta = spec_.theta;
      const double B = spec_.B;
      const double gap_lo = lo.gap;
      // Below this gap s exceeds the saturation point and the density is 0.
      const double gap_min = sigma2 * lo.t / (B * kSaturatedS);
      double v_hi = std::log(gap_lo / gap_min);
      if (!hi.at_bound) v_hi = std::min(v_hi, std::log(gap_lo / hi.gap));
      if (!(v_hi > 0)) return 0.0;
      auto integrand = [&](double v) {
        const double gap = gap_lo * std::exp(-v);
        const double t = theta - gap;
        const double s = sigma2 * t / (B * gap);
        if (!(s < kSaturatedS)) return 0.0;
        // g(t) dt = g(t) gap dv, and g(t) gap = prefactor * bracket * theta / t.
        return call(f, t, gap) * core_.pdf_prefactor(s) * core_.pdf_bracket(s) * theta / t;
      };
      return quad::integrate(integrand, 0.0, v_hi, opt).value;
    }

    const double A = spec_.A;
    const double t_max = kSaturatedS * A / sigma2;
    double w_hi = std::log(t_max / lo.t);
    if (!hi.at_bound) w_hi = std::min(w_hi, std::log(hi.t / lo.t));
    if (!(w_hi > 0)) return 0.0;
    auto integrand = [&](double w) {
      const double t = lo.t * std::exp(w);
      const double s = sigma2 * t / A;
      if (!(s < kSaturatedS)) return 0.0;
      return call(f, t, kInf) * core_.pdf_prefactor(s) * core_.pdf_bracket(s);
    };
    return quad::integrate(integrand, 0.0, w_hi, opt).value;
  }

  template <class F>
  double expect(const F& f, double lo, Limit hi = Limit::bound(), double rel_tol = 1e-9) const {
    return expect(f, point(lo), hi, rel_tol);
  }

 private:
  // Integrands may take (t) or (t, theta - t).
  template <class F>
  static double call(const F& f, double t, double gap) {
    if constexpr (std::is_invocable_v<const F&, double, double>)
      return f(t, gap);
    else
      return f(t);
  }

  DistSpec spec_;
  detail::DistributionCore core_;
};

/// Channel-gain threshold for the given distribution.
inline double s_value(const DistSpec& spec, double t) {
  if (!(t > 0)) throw std::domain_error("SINR threshold must be positive");
  if (!(t < spec.theta)) throw std::domain_error("threshold outside the SINR support");
  const double den = spec.A - spec.B * t;
  return den > 0 ? spec.sigma2 * t / den : kInf;
}

inline double coverage(const DistSpec& spec, double t, const SystemParams& params) {
  return SinrDistribution(spec, params).coverage(t);
}

inline double pdf(const DistSpec& spec, double t, const SystemParams& params) {
  return SinrDistribution(spec, params).pdf(t);
}

/// Both readings of the outage condition for one (kind, class, t, split).
struct OutageCheck {
  bool remark = false;      // power-allocation inequalities as stated in the remarks
  bool structural = false;  // t >= theta, or the stream carries no power
  bool outage = false;      // decision; the structural reading wins on disagreement
  bool agree() const noexcept { return remark == structural; }
};

inline OutageCheck outage_check(SinrKind kind, ReceiverClass n, double t, const PowerSplit& split) {
  if (!(t > 0)) throw std::domain_error("threshold must be positive");
  const double b = split.beta;
  const double r = split.rho;
  const double own_share = n == ReceiverClass::Center ? r : 1.0 - r;
  bool remark = false;
  if (n == ReceiverClass::Center) {
    switch (kind) {
      case SinrKind::Common: remark = b <= t / (1 + t); break;
      case SinrKind::Private: remark = r <= t / (1 + t); break;
      case SinrKind::PrivateWithInterference:
        remark = (b <= 1 / (1 + t) && r <= -t / (b * t + b - t - 1)) || b > 1 / (1 + t);
        break;
      case SinrKind::CommonIIC: remark = b <= r * t / (1 + r * t); break;
      case SinrKind::PrivateIIC: remark = false; break;
      case SinrKind::PrivateWithInterferenceIIC:
        remark = (r == 0 && b > 0) || (r > 0 && b >= r / (r + t));
        break;
    }
  } else {
    switch (kind) {
      case SinrKind::Common: remark = b <= t / (1 + t); break;
      case SinrKind::Private: remark = r >= 1 / (1 + t); break;
      case SinrKind::PrivateWithInterference:
        remark = (b <= 1 / (1 + t) && r > (b * t + b - 1) / (b * t + b - t - 1)) || b > 1 / (1 + t);
        break;
      case SinrKind::CommonIIC: remark = b <= (r * t - t) / (r * t - t - 1); break;
      case SinrKind::PrivateIIC: remark = false; break;
      case SinrKind::PrivateWithInterferenceIIC:
        remark = (r == 1 && b > 0) || (r < 1 && b >= (r - 1) / (r - t - 1));
        break;
    }
  }
  // A stream without power has an identically zero SINR.
  const bool common_kind = kind == SinrKind::Common || kind == SinrKind::CommonIIC;
  const bool silent = common_kind ? b == 0 : (b == 1 || own_share == 0);
  remark = remark || silent;

  // Structural reading with unit power: the bounds only depend on the split.
  const auto pw = stream_powers(1.0, split);
  const auto spec = dist_spec(kind, n, pw, 1.0);
  const bool structural = spec.vanishes() || !(t < spec.theta);
  return {remark, structural, structural};
}

/// True iff the coverage of the given SINR at threshold t is identically zero.
inline bool outage_region(SinrKind kind, ReceiverClass n, double t, const PowerSplit& split) {
  return outage_check(kind, n, t, split).outage;
}

}  // namespace crs
