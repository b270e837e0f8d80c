#pragma once

// Coded-caching placement and XOR delivery, MPC bookkeeping and the mapping
// from request patterns to the per-mode subcases.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crs/core_model.hpp"
#include "crs/philox.hpp"

namespace crs {

/// Non-negative exact fraction, always reduced.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) n = -n, d = -d;
    const auto g = std::gcd(n, d);
    return g == 0 ? Fraction{0, 1} : Fraction{n / g, d / g};
  }
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend Fraction operator*(Fraction a, Fraction b) { return make(a.num * b.num, a.den * b.den); }
  friend Fraction operator+(Fraction a, Fraction b) { return make(a.num * b.den + b.num * a.den, a.den * b.den); }
};

inline std::ostream& operator<<(std::ostream& os, const Fraction& f) {
  return f.den == 1 ? os << f.num : os << f.num << '/' << f.den;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All size-t subsets of {1..K}, sorted ascending inside, lexicographic overall.
inline std::vector<std::vector<int>> subsets(int K, int t) {
  std::vector<std::vector<int>> out;
  if (t < 0 || t > K) return out;
  std::vector<int> cur(static_cast<std::size_t>(t));
  std::iota(cur.begin(), cur.end(), 1);
  while (true) {
    out.push_back(cur);
    int i = t - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == K - t + i + 1) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

struct CCConfig {
  int K = 0;
  int M = 0;
  int N = 0;
  int t = 0;

  static CCConfig make(int K, int M, int N) {
    if (K < 2) throw std::invalid_argument("coded caching needs K >= 2");
    if (!(M >= 1 && N > M)) throw std::invalid_argument("coded caching needs 1 <= M < N");
    const long mk = static_cast<long>(M) * K;
    if (mk % N != 0 || mk / N < 1 || mk / N > K - 1)
      throw std::invalid_argument("t = MK/N must be an integer in {1,...,K-1} (K=" + std::to_string(K) +
                                  ", M=" + std::to_string(M) + ", N=" + std::to_string(N) + ")");
    return {K, M, N, static_cast<int>(mk / N)};
  }

  static bool valid(int K, int M, int N) noexcept {
    if (K < 2 || M < 1 || N <= M) return false;
    const long mk = static_cast<long>(M) * K;
    return mk % N == 0 && mk / N >= 1 && mk / N <= K - 1;
  }

  std::int64_t subfiles_per_file() const { return binomial(K, t); }
};

struct SubfileId {
  int f = 0;             // file rank, 1-based
  std::vector<int> W;    // receivers holding the subfile, sorted

  friend auto operator<=>(const SubfileId&, const SubfileId&) = default;
  friend bool operator==(const SubfileId&, const SubfileId&) = default;
};

inline std::string format_set(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

inline std::ostream& operator<<(std::ostream& os, const SubfileId& id) {
  return os << 'S' << id.f << format_set(id.W);
}

/// Placement is identical for every file: receiver i stores S_{f,W} for all W containing i.
class PlacementMap {
 public:
  explicit PlacementMap(const CCConfig& cfg) : cfg_(cfg), lambda_(subsets(cfg.K, cfg.t)) {
    held_.resize(static_cast<std::size_t>(cfg.K));
    for (std::size_t w = 0; w < lambda_.size(); ++w)
      for (int r : lambda_[w]) held_[static_cast<std::size_t>(r - 1)].push_back(w);
  }

  const CCConfig& config() const noexcept { return cfg_; }

  /// Lambda_f as receiver subsets, in canonical order.
  const std::vector<std::vector<int>>& subsets_per_file() const noexcept { return lambda_; }

  /// T_{f,i}: the subfiles of file f stored by receiver i (1-based).
  std::vector<SubfileId> stored(int f, int receiver) const {
    check_receiver(receiver);
    if (f < 1 || f > cfg_.N) throw std::out_of_range("file rank outside the coded catalog");
    std::vector<SubfileId> out;
    for (auto w : held_[static_cast<std::size_t>(receiver - 1)]) out.push_back({f, lambda_[w]});
    return out;
  }

  bool holds(int receiver, const SubfileId& id) const {
    check_receiver(receiver);
    return id.f >= 1 && id.f <= cfg_.N && std::binary_search(id.W.begin(), id.W.end(), receiver);
  }

  /// Stored fraction of each file, t/K.
  Fraction fraction_per_file() const {
    return Fraction::make(static_cast<std::int64_t>(held_[0].size()), cfg_.subfiles_per_file());
  }

  /// Total stored volume in files for one receiver.
  Fraction storage(int receiver) const {
    check_receiver(receiver);
    return Fraction::make(static_cast<std::int64_t>(held_[static_cast<std::size_t>(receiver - 1)].size()) * cfg_.N,
                          cfg_.subfiles_per_file());
  }

  /// Lines "f {W} -> r1 r2 ..." in file-then-subset order.
  void write_text(std::ostream& os) const {
    for (int f = 1; f <= cfg_.N; ++f)
      for (const auto& w : lambda_) {
        os << f << ' ' << format_set(w) << " ->";
        for (int r : w) os << ' ' << r;
        os << '\n';
      }
  }

  std::string text() const {
    std::ostringstream os;
    write_text(os);
    return os.str();
  }

 private:
  void check_receiver(int r) const {
    if (r < 1 || r > cfg_.K) throw std::out_of_range("receiver index outside 1..K");
  }

  CCConfig cfg_;
  std::vector<std::vector<int>> lambda_;
  std::vector<std::vector<std::size_t>> held_;
};

inline PlacementMap cc_place(const CCConfig& cfg) { return PlacementMap(cfg); }

/// One coded multicast: the XOR of `parts`, useful to every receiver in `S`.
struct XorTransmission {
  std::vector<int> S;
  std::vector<SubfileId> parts;  // parts[k] is wanted by S[k]
};

/// For every (t+1)-subset S: XOR over k in S of S_{d_k, S \ {k}}.
/// demands[k-1] is the file rank requested by receiver k.
inline std::vector<XorTransmission> cc_delivery_schedule(const CCConfig& cfg, const std::vector<int>& demands) {
  if (static_cast<int>(demands.size()) != cfg.K) throw std::invalid_argument("need exactly K demands");
  for (int d : demands)
    if (d < 1 || d > cfg.N) throw std::invalid_argument("XOR delivery needs every demand rank in 1..N");
  std::vector<XorTransmission> out;
  for (auto& S : subsets(cfg.K, cfg.t + 1)) {
    XorTransmission x;
    x.S = S;
    for (int k : S) {
      std::vector<int> rest;
      std::copy_if(S.begin(), S.end(), std::back_inserter(rest), [k](int r) { return r != k; });
      x.parts.push_back({demands[static_cast<std::size_t>(k - 1)], std::move(rest)});
    }
    out.push_back(std::move(x));
  }
  return out;
}

/// Transmitted volume of a schedule divided by K, in files.
inline Fraction per_receiver_load(const CCConfig& cfg, std::size_t transmissions) {
  return Fraction::make(static_cast<std::int64_t>(transmissions), cfg.K * cfg.subfiles_per_file());
}

/// (1 - M/N) / (1 + KM/N) = (N - M) / (N + KM).
inline Fraction xor_load(const CCConfig& cfg) {
  return Fraction::make(cfg.N - cfg.M, cfg.N + static_cast<std::int64_t>(cfg.K) * cfg.M);
}

enum class Mode { AllMPC, CC_MPC, MPC_CC, AllCC };

inline constexpr std::array<Mode, 4> kAllModes = {Mode::AllMPC, Mode::CC_MPC, Mode::MPC_CC, Mode::AllCC};

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::AllMPC: return "all-mpc";
    case Mode::CC_MPC: return "cc-mpc";
    case Mode::MPC_CC: return "mpc-cc";
    case Mode::AllCC: return "all-cc";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  for (auto m : kAllModes)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode: " + std::string(s));
}

constexpr bool uses_cc(Mode m, ReceiverClass n) noexcept {
  if (m == Mode::AllCC) return true;
  if (m == Mode::AllMPC) return false;
  return (m == Mode::CC_MPC) == (n == ReceiverClass::Center);
}

constexpr std::string_view request_kind(int index) noexcept {
  return index == 3 ? "XOR" : index == 2 ? "PFR" : "EFR";
}

struct Subcase {
  Mode mode = Mode::AllMPC;
  int i = 1;  // center pre-log index
  int j = 1;  // edge pre-log index
  IicAt iic_at = IicAt::None;
  int scheduled_center = 1;
  int scheduled_edge = 1;

  int index(ReceiverClass n) const noexcept { return n == ReceiverClass::Center ? i : j; }

  /// e.g. "XOR/EFR+IIC-e".
  std::string label() const {
    std::string s = std::string(request_kind(i)) + "/" + std::string(request_kind(j));
    if (iic_at == IicAt::Center) s += "+IIC-c";
    if (iic_at == IicAt::Edge) s += "+IIC-e";
    return s;
  }

  /// Throws if the tuple is not a row the mode can produce.
  void validate(int K) const {
    auto fail = [this](const char* why) {
      throw std::invalid_argument("subcase " + label() + " invalid for mode " + std::string(to_string(mode)) + ": " + why);
    };
    if (i < 1 || i > 3 || j < 1 || j > 3) fail("pre-log index outside 1..3");
    if (!uses_cc(mode, ReceiverClass::Center) && i != 1) fail("MPC center only places EFR");
    if (!uses_cc(mode, ReceiverClass::Edge) && j != 1) fail("MPC edge only places EFR");
    if (scheduled_center != (i == 3 ? K : 1) || scheduled_edge != (j == 3 ? K : 1))
      fail("XOR must schedule K receivers and other requests one");
    switch (iic_at) {
      case IicAt::None: break;
      case IicAt::Edge:
        if (mode != Mode::CC_MPC || i == 1) fail("edge IIC needs CC/MPC with a cached center request");
        break;
      case IicAt::Center:
        if (mode != Mode::MPC_CC || j == 1) fail("center IIC needs MPC/CC with a cached edge request");
        break;
    }
  }

  friend bool operator==(const Subcase&, const Subcase&) = default;
};

inline Subcase make_subcase(Mode mode, int i, int j, IicAt iic, int K) {
  Subcase s{mode, i, j, iic, i == 3 ? K : 1, j == 3 ? K : 1};
  s.validate(K);
  return s;
}

/// Every subcase a mode can produce, in a fixed order.
inline std::vector<Subcase> all_subcases(Mode mode, int K) {
  std::vector<Subcase> out;
  switch (mode) {
    case Mode::AllMPC: out.push_back(make_subcase(mode, 1, 1, IicAt::None, K)); break;
    case Mode::CC_MPC:
      for (auto [i, iic] : {std::pair{3, IicAt::Edge}, {2, IicAt::Edge}, {3, IicAt::None}, {2, IicAt::None}, {1, IicAt::None}})
        out.push_back(make_subcase(mode, i, 1, iic, K));
      break;
    case Mode::MPC_CC:
      for (auto [j, iic] : {std::pair{3, IicAt::Center}, {2, IicAt::Center}, {3, IicAt::None}, {2, IicAt::None}, {1, IicAt::None}})
        out.push_back(make_subcase(mode, 1, j, iic, K));
      break;
    case Mode::AllCC:
      for (int i = 3; i >= 1; --i)
        for (int j = 3; j >= 1; --j) out.push_back(make_subcase(mode, i, j, IicAt::None, K));
      break;
  }
  return out;
}

/// 0-based positions of the receivers scheduled when XOR is infeasible.
struct ScheduleChoice {
  int center = 0;
  int edge = 0;
};

namespace detail {

struct ClassOutcome {
  int index = 1;
  bool all_cached_whole = false;  // every served request has rank <= M
};

inline ClassOutcome classify_class(bool cc, const std::vector<int>& ranks, int chosen, const SystemParams& p) {
  if (!cc) return {1, false};
  const bool all_coded = std::all_of(ranks.begin(), ranks.end(), [&](int f) { return f <= p.N; });
  if (all_coded) {
    const bool all_whole = std::all_of(ranks.begin(), ranks.end(), [&](int f) { return f <= p.M; });
    return {3, all_whole};
  }
  const int f = ranks[static_cast<std::size_t>(chosen)];
  if (f <= p.N) return {2, f <= p.M};
  return {1, false};
}

}  // namespace detail

/// Maps one request pattern to its subcase. An MPC class always places an
/// uncached EFR; XOR is used when all K ranks of a CC class are coded,
/// otherwise the chosen receiver is served alone.
inline Subcase classify_subcase(Mode mode, const std::vector<int>& center_requests,
                                const std::vector<int>& edge_requests, const SystemParams& params,
                                ScheduleChoice choice) {
  const auto K = static_cast<std::size_t>(params.K);
  if (center_requests.size() != K || edge_requests.size() != K)
    throw std::invalid_argument("need K requests per class");
  for (const auto* v : {&center_requests, &edge_requests})
    for (int f : *v)
      if (f < 1 || f > params.F) throw std::invalid_argument("request rank outside 1..F");
  if (choice.center < 0 || choice.center >= params.K || choice.edge < 0 || choice.edge >= params.K)
    throw std::out_of_range("scheduled receiver outside the class");

  const auto c = detail::classify_class(uses_cc(mode, ReceiverClass::Center), center_requests, choice.center, params);
  const auto e = detail::classify_class(uses_cc(mode, ReceiverClass::Edge), edge_requests, choice.edge, params);
  IicAt iic = IicAt::None;
  if (mode == Mode::CC_MPC && c.all_cached_whole) iic = IicAt::Edge;
  if (mode == Mode::MPC_CC && e.all_cached_whole) iic = IicAt::Center;
  return make_subcase(mode, c.index, e.index, iic, params.K);
}

template <class URBG>
Subcase classify_subcase(Mode mode, const std::vector<int>& center_requests, const std::vector<int>& edge_requests,
                         const SystemParams& params, URBG& rng) {
  std::uniform_int_distribution<int> pick(0, params.K - 1);
  ScheduleChoice choice;
  choice.center = pick(rng);
  choice.edge = pick(rng);
  return classify_subcase(mode, center_requests, edge_requests, params, choice);
}

/// I.i.d. ranks from a Zipf(gamma) law truncated to 1..F (demo plumbing).
inline std::vector<int> sample_requests(int F, double gamma, std::size_t count, std::uint64_t seed) {
  if (F < 1) throw std::invalid_argument("F must be >= 1");
  if (!(gamma >= 0)) throw std::invalid_argument("popularity exponent must be >= 0");
  std::vector<double> cdf(static_cast<std::size_t>(F));
  double acc = 0;
  for (int f = 1; f <= F; ++f) cdf[static_cast<std::size_t>(f - 1)] = acc += std::pow(static_cast<double>(f), -gamma);
  for (auto& c : cdf) c /= acc;
  cdf.back() = 1.0;
  PhiloxEngine rng(seed, 0x5a17f);
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double u = rng.uniform();
    out.push_back(static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1);
  }
  return out;
}

}  // namespace crs
