#pragma once

// System model of the caching-aided rate-splitting downlink: power split,
// pre-log factors, decoding thresholds, interference-limited SINR bounds and
// instantaneous SINR evaluation.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ReceiverClass { Center, Edge };

constexpr ReceiverClass other(ReceiverClass c) noexcept {
  return c == ReceiverClass::Center ? ReceiverClass::Edge : ReceiverClass::Center;
}

constexpr std::string_view to_string(ReceiverClass c) noexcept {
  return c == ReceiverClass::Center ? "center" : "edge";
}

inline ReceiverClass parse_receiver_class(std::string_view s) {
  if (s == "center" || s == "c") return ReceiverClass::Center;
  if (s == "edge" || s == "e") return ReceiverClass::Edge;
  throw std::invalid_argument("unknown receiver class: " + std::string(s));
}

/// The six SINR expressions a receiver can experience. The IIC variants apply
/// when the receiver removes the other class's private stream using its cache.
enum class SinrKind {
  Common,                      // s0 with both private streams as interference
  Private,                     // s_n after s0 has been cancelled
  PrivateWithInterference,     // s_n with s0 still present
  CommonIIC,                   // s0 with s_k removed from cache
  PrivateIIC,                  // s_n with s0 and s_k removed
  PrivateWithInterferenceIIC,  // s_n with s_k removed, s0 present
};

inline constexpr std::array<SinrKind, 6> kAllSinrKinds = {
    SinrKind::Common,    SinrKind::Private,    SinrKind::PrivateWithInterference,
    SinrKind::CommonIIC, SinrKind::PrivateIIC, SinrKind::PrivateWithInterferenceIIC};

constexpr std::string_view to_string(SinrKind k) noexcept {
  switch (k) {
    case SinrKind::Common: return "common";
    case SinrKind::Private: return "private";
    case SinrKind::PrivateWithInterference: return "private-interf";
    case SinrKind::CommonIIC: return "common-iic";
    case SinrKind::PrivateIIC: return "private-iic";
    case SinrKind::PrivateWithInterferenceIIC: return "private-interf-iic";
  }
  return "?";
}

inline SinrKind parse_sinr_kind(std::string_view s) {
  for (auto k : kAllSinrKinds)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown SINR kind: " + std::string(s));
}

constexpr bool is_iic(SinrKind k) noexcept {
  return k == SinrKind::CommonIIC || k == SinrKind::PrivateIIC ||
         k == SinrKind::PrivateWithInterferenceIIC;
}

/// Which receiver (if any) removes the other class's private stream from its cache.
enum class IicAt { None, Center, Edge };

constexpr std::string_view to_string(IicAt a) noexcept {
  switch (a) {
    case IicAt::None: return "none";
    case IicAt::Center: return "center";
    case IicAt::Edge: return "edge";
  }
  return "?";
}

inline IicAt parse_iic_at(std::string_view s) {
  if (s == "none") return IicAt::None;
  if (s == "center") return IicAt::Center;
  if (s == "edge") return IicAt::Edge;
  throw std::invalid_argument("unknown IIC location: " + std::string(s));
}

constexpr bool iic_applies(IicAt a, ReceiverClass n) noexcept {
  return (a == IicAt::Center && n == ReceiverClass::Center) || (a == IicAt::Edge && n == ReceiverClass::Edge);
}

/// Role of one receiver with respect to IIC.
enum class IicContext { None, Self, Other };

constexpr IicContext iic_context(IicAt a, ReceiverClass n) noexcept {
  if (a == IicAt::None) return IicContext::None;
  return iic_applies(a, n) ? IicContext::Self : IicContext::Other;
}

constexpr IicAt iic_location(IicContext ctx, ReceiverClass n) noexcept {
  switch (ctx) {
    case IicContext::None: return IicAt::None;
    case IicContext::Self: return n == ReceiverClass::Center ? IicAt::Center : IicAt::Edge;
    case IicContext::Other: return n == ReceiverClass::Center ? IicAt::Edge : IicAt::Center;
  }
  return IicAt::None;
}

/// Physical, topology and caching constants. Defaults are the reference
/// operating point with path-loss exponent 4.
struct SystemParams {
  double P = 10.0;       // transmit power [W]
  double sigma2 = 1e-5;  // noise variance [W]
  double alpha = 4.0;    // path-loss exponent
  double r_c = 50.0;     // center disk radius [m]
  double r_e = 60.0;     // edge annulus inner radius [m]
  double r_0 = 70.0;     // cell radius [m]
  int K = 5;             // receivers per class
  int M = 30;            // cache size [files]
  int N = 50;            // coded-caching catalog depth [files]
  int F = 100;           // library size [files]
  double zeta = 0.5;     // common-stream SINR threshold
  double xi = 1.0;       // private-stream base threshold
  double u = 0.5;        // share of the jointly decoded common rate given to the center

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (!(P > 0)) fail("P must be positive");
    if (!(sigma2 > 0)) fail("sigma2 must be positive");
    if (!(alpha > 2)) fail("alpha must exceed 2");
    if (!(r_c > 0 && r_c < r_e && r_e <= r_0)) fail("radii must satisfy 0 < r_c < r_e <= r_0");
    if (K < 1) fail("K must be at least 1");
    if (!(M >= 1 && N > M)) fail("cache sizes must satisfy 1 <= M < N");
    if (F < N) fail("library size F must be >= N");
    if (!(zeta > 0)) fail("zeta must be positive");
    if (!(xi > 0)) fail("xi must be positive");
    if (!(u >= 0 && u <= 1)) fail("u must lie in [0,1]");
  }

  /// Coded-caching replication t = MK/N is an integer in {1..K-1}.
  bool coded_caching_valid() const noexcept {
    const long mk = static_cast<long>(M) * K;
    if (mk % N != 0) return false;
    const long t = mk / N;
    return t >= 1 && t <= K - 1;
  }
};

struct PowerSplit {
  double beta = 0.7;  // fraction of P on the common stream
  double rho = 0.5;   // fraction of the private power on the center stream

  PowerSplit() = default;
  PowerSplit(double b, double r) : beta(b), rho(r) {
    if (!(b >= 0 && b <= 1)) throw std::invalid_argument("beta must lie in [0,1]");
    if (!(r >= 0 && r <= 1)) throw std::invalid_argument("rho must lie in [0,1]");
  }
};

struct StreamPowers {
  double p0 = 0;
  double pc = 0;
  double pe = 0;

  constexpr double own(ReceiverClass n) const noexcept {
    return n == ReceiverClass::Center ? pc : pe;
  }
  constexpr double cross(ReceiverClass n) const noexcept { return own(other(n)); }
  constexpr double total() const noexcept { return p0 + pc + pe; }
};

inline StreamPowers stream_powers(double P, const PowerSplit& split) {
  if (!(P > 0)) throw std::invalid_argument("P must be positive");
  const double priv = (1.0 - split.beta) * P;
  return {split.beta * P, priv * split.rho, priv * (1.0 - split.rho)};
}

namespace detail {
// Zero denominators map to +inf, including 0/0.
constexpr double bound_ratio(double num, double den) noexcept {
  return den == 0.0 ? kInf : num / den;
}
}  // namespace detail

/// Interference-limited upper bounds of the SINRs for one receiver class.
struct ThetaSet {
  double theta1 = 0;  // p0/(pn+pk), common
  double theta2 = 0;  // pn/pk, private after s0
  double theta3 = 0;  // pn/(p0+pk), private under s0
  double theta4 = 0;  // p0/pn, common with IIC; its inverse bounds private-interf with IIC
  bool degenerate = false;  // some ratio was 0/0

  /// Bound of the given SINR kind (Table of distribution parameters, row theta).
  double bound(SinrKind k) const noexcept {
    switch (k) {
      case SinrKind::Common: return theta1;
      case SinrKind::Private: return theta2;
      case SinrKind::PrivateWithInterference: return theta3;
      case SinrKind::CommonIIC: return theta4;
      case SinrKind::PrivateIIC: return kInf;
      case SinrKind::PrivateWithInterferenceIIC: return inverse_theta4();
    }
    return kInf;
  }

  double inverse_theta4() const noexcept {
    if (theta4 == kInf) return 0.0;
    if (theta4 == 0.0) return kInf;
    return 1.0 / theta4;
  }
};

inline ThetaSet theta_set(ReceiverClass n, const StreamPowers& pw) {
  const double pn = pw.own(n);
  const double pk = pw.cross(n);
  ThetaSet s;
  s.theta1 = detail::bound_ratio(pw.p0, pn + pk);
  s.theta2 = detail::bound_ratio(pn, pk);
  s.theta3 = detail::bound_ratio(pn, pw.p0 + pk);
  s.theta4 = detail::bound_ratio(pw.p0, pn);
  s.degenerate = (pw.p0 == 0 && pn + pk == 0) || (pn == 0 && pk == 0) ||
                 (pn == 0 && pw.p0 + pk == 0) || (pw.p0 == 0 && pn == 0);
  return s;
}

/// Pre-log factors: inverse transmit load for EFR, PFR and XOR delivery.
struct PrelogSet {
  std::array<double, 3> omega{1.0, 1.0, 1.0};

  double operator[](int index) const {
    if (index < 1 || index > 3) throw std::out_of_range("pre-log index must be 1, 2 or 3");
    return omega[static_cast<std::size_t>(index - 1)];
  }
};

/// Throws if MK/N is not an integer in {1..K-1}, since the XOR factor is undefined then.
inline PrelogSet prelog_set(int K, int M, int N) {
  if (!(N > M && M >= 1)) throw std::invalid_argument("pre-log factors need 1 <= M < N");
  const long mk = static_cast<long>(M) * K;
  if (mk % N != 0 || mk / N < 1 || mk / N > K - 1)
    throw std::invalid_argument("coded caching needs t = MK/N integer in {1,...,K-1}");
  const double frac = static_cast<double>(M) / N;
  const double t = static_cast<double>(mk / N);
  return {{1.0, 1.0 / (1.0 - frac), (1.0 + t) / (1.0 - frac)}};
}

/// Single pre-log factor; unlike prelog_set, omega_1 and omega_2 need no valid XOR configuration.
inline double prelog_factor(int index, int K, int M, int N) {
  switch (index) {
    case 1: return 1.0;
    case 2:
      if (!(N > M && M >= 0)) throw std::invalid_argument("pre-log factors need 0 <= M < N");
      return 1.0 / (1.0 - static_cast<double>(M) / N);
    case 3: return prelog_set(K, M, N)[3];
    default: throw std::out_of_range("pre-log index must be 1, 2 or 3");
  }
}

/// Private-stream SINR threshold for a request served with pre-log omega.
inline double private_threshold(double omega, double xi) {
  if (!(omega >= 1)) throw std::invalid_argument("pre-log factor must be >= 1");
  if (!(xi > 0)) throw std::invalid_argument("xi must be positive");
  if (omega == 1.0) return xi;
  return std::expm1(std::log1p(xi) / omega);
}

/// Rate with pre-log factor omega at SINR eta.
inline double prelog_rate(double omega, double eta) noexcept { return omega * std::log2(1.0 + eta); }

/// SINR of the given kind for receiver n at channel gain L.
inline double instantaneous_sinr(SinrKind kind, ReceiverClass n, const StreamPowers& pw,
                                 double L, double sigma2) {
  if (!(L > 0)) throw std::invalid_argument("channel gain must be positive");
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
  const double noise = sigma2 / L;
  const double pn = pw.own(n);
  const double pk = pw.cross(n);
  switch (kind) {
    case SinrKind::Common: return pw.p0 / (pn + pk + noise);
    case SinrKind::Private: return pn / (pk + noise);
    case SinrKind::PrivateWithInterference: return pn / (pw.p0 + pk + noise);
    case SinrKind::CommonIIC: return pw.p0 / (pn + noise);
    case SinrKind::PrivateIIC: return pn / noise;
    case SinrKind::PrivateWithInterferenceIIC: return pn / (pw.p0 + noise);
  }
  return 0.0;
}

/// Rayleigh-faded path loss h / (1 + d^alpha).
inline double channel_gain(double h, double d, double alpha) noexcept {
  return h / (1.0 + std::pow(d, alpha));
}

}  // namespace crs
