#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace zeta {

struct MinResult {
  double x;
  double value;
};

/// Golden-section minimisation on [a, b] for a unimodal f; stops when the
/// bracket width drops below rel_tol * (1 + |x|).
template <class F>
MinResult goldenMin(F&& f, double a, double b, double rel_tol, int max_iter = 400) {
  const double inv_gr = 0.6180339887498948482;  // 1/golden ratio
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter; ++i) {
    if (b - a <= rel_tol * (1.0 + std::abs(a) + std::abs(b))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = f(d);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

/// Coarse scan on n points of [a, b] followed by golden-section refinement
/// around the best sample; guards against missing the basin of a function
/// that is only piecewise unimodal.
template <class F>
MinResult scanThenGoldenMin(F&& f, double a, double b, int n, double rel_tol) {
  double best_x = a;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1);
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double step = (b - a) / (n - 1);
  const double lo = std::max(a, best_x - step);
  const double hi = std::min(b, best_x + step);
  MinResult r = goldenMin(f, lo, hi, rel_tol);
  if (best_v < r.value) return {best_x, best_v};
  return r;
}

}  // namespace zeta
