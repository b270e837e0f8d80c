#pragma once

// Incomplete gamma functions for the coverage-probability closed forms.
// Series expansion below x = a + 1, modified Lentz continued fraction above.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crs::special {

namespace detail {

inline constexpr int kMaxIter = 10000;
inline constexpr double kEps = 1e-16;

// Sum_{n>=0} x^n / (a (a+1) ... (a+n)); gamma(a,x) = x^a e^{-x} * series.
inline double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum;
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

// Continued fraction for Gamma(a,x) / (x^a e^{-x}).
inline double gamma_cf(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

inline double prefactor(double a, double x) {
  // x^a e^{-x}, computed in log space to survive large x.
  return std::exp(a * std::log(x) - x);
}

}  // namespace detail

/// Lower incomplete gamma function gamma(a, x) = int_0^x t^{a-1} e^{-t} dt.
inline double lower_gamma(double a, double x) {
  if (!(a > 0)) throw std::domain_error("lower_gamma requires a > 0");
  if (std::isnan(x)) return x;
  if (x <= 0) return 0.0;
  if (std::isinf(x)) return std::tgamma(a);
  if (x < a + 1.0) return detail::prefactor(a, x) * detail::gamma_series(a, x);
  return std::tgamma(a) - detail::prefactor(a, x) * detail::gamma_cf(a, x);
}

/// Upper incomplete gamma function Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
inline double upper_gamma(double a, double x) {
  if (!(a > 0)) throw std::domain_error("upper_gamma requires a > 0");
  if (std::isnan(x)) return x;
  if (x <= 0) return std::tgamma(a);
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::tgamma(a) - detail::prefactor(a, x) * detail::gamma_series(a, x);
  return detail::prefactor(a, x) * detail::gamma_cf(a, x);
}

/// gamma(a, hi) - gamma(a, lo) for lo <= hi, avoiding cancellation when both
/// arguments sit in the saturated tail.
inline double lower_gamma_diff(double a, double lo, double hi) {
  if (!(lo <= hi)) throw std::domain_error("lower_gamma_diff requires lo <= hi");
  if (lo >= a + 1.0) return upper_gamma(a, lo) - upper_gamma(a, hi);
  return lower_gamma(a, hi) - lower_gamma(a, lo);
}

}  // namespace crs::special
