#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "infomenu/errors.hpp"

namespace infomenu::numerics {

inline constexpr int kMaxBisectionIterations = 200;

struct Root {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Bracketed bisection. Requires fn(lo) and fn(hi) of opposite sign (a zero at
// either end is accepted as the root). Stops when the bracket is narrower
// than `x_tol` or after kMaxBisectionIterations halvings.
template <class Fn>
Root bisect(Fn&& fn, double lo, double hi, double x_tol, const std::string& equation) {
  double f_lo = fn(lo);
  double f_hi = fn(hi);
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
    throw RootNotBracketed(equation, "f(" + std::to_string(lo) + ")=" + std::to_string(f_lo) +
                                         ", f(" + std::to_string(hi) + ")=" + std::to_string(f_hi));
  }
  int it = 0;
  while (it < kMaxBisectionIterations && hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = fn(mid);
    ++it;
    if (f_mid == 0.0) return {mid, 0.0, it};
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  // Report the endpoint with the smaller residual.
  if (std::abs(f_lo) <= std::abs(f_hi)) return {lo, f_lo, it};
  return {hi, f_hi, it};
}

// Boundary of a monotone predicate: pred(lo) is true, pred(hi) false.
// Returns the last point where pred holds, to within x_tol.
template <class Pred>
double bisect_predicate(Pred&& pred, double lo, double hi, double x_tol) {
  for (int it = 0; it < kMaxBisectionIterations && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Golden-section maximization on [lo, hi].
template <class Fn>
double golden_section_max(Fn&& fn, double lo, double hi, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < kMaxBisectionIterations && b - a > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? c : d;
}

// Composite trapezoid over sorted abscissae.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

}  // namespace infomenu::numerics
