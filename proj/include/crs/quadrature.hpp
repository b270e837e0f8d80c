#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

namespace crs::quad {

struct Result {
  double value = 0;
  double error = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-300;
  std::size_t initial_pieces = 1;
  std::size_t max_intervals = 4000;
};

namespace detail {

// Kronrod abscissae on [0,1] (odd ones are Gauss points) with weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
};

template <class F>
Piece gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b]. The interval with the largest error estimate is
/// bisected until the summed estimate meets max(abs_tol, rel_tol * |I|).
template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
  Result out;
  if (!(b > a)) return out;
  std::vector<detail::Piece> heap;
  const std::size_t n0 = std::max<std::size_t>(1, opt.initial_pieces);
  heap.reserve(n0 + 64);
  const auto by_error = [](const detail::Piece& l, const detail::Piece& r) { return l.error < r.error; };
  for (std::size_t i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(n0);
    const double hi = i + 1 == n0 ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n0);
    heap.push_back(detail::gk15(f, lo, hi));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  out.evaluations = 15 * n0;

  auto totals = [&] {
    double v = 0, e = 0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (heap.size() >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Piece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval no longer divisible
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      out.converged = false;
      break;
    }
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Re-sum periodically so the running totals do not drift.
    if (heap.size() % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(out.value, out.error) = totals();
  return out;
}

}  // namespace crs::quad
