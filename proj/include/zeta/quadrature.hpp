#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace zeta {

namespace detail {

template <class F>
double adaptiveSimpsonRec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptiveSimpsonRec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptiveSimpsonRec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with absolute tolerance.  Starts from 16 panels
/// so a piecewise integrand cannot masquerade as a single polynomial at the
/// first sample points.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (a == b) return 0.0;
  auto& fr = f;
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  double x0 = a;
  double f0 = fr(x0);
  for (int i = 1; i <= kPanels; ++i) {
    const double x1 = (i == kPanels) ? b : a + i * h;
    const double f1 = fr(x1);
    const double xm = 0.5 * (x0 + x1);
    const double fm = fr(xm);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::adaptiveSimpsonRec(fr, x0, x1, f0, fm, f1, whole, abs_tol / kPanels, max_depth);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

/// Integrate with the interval pre-split at the given interior points (kinks,
/// sign changes); points need not be sorted or inside [a, b].
template <class F>
double integrateSplit(F&& f, double a, double b, std::vector<double> splits, double abs_tol) {
  splits.push_back(a);
  splits.push_back(b);
  std::sort(splits.begin(), splits.end());
  double total = 0.0;
  double lo = a;
  for (double s : splits) {
    if (s <= lo || s > b) continue;
    total += integrate(f, lo, s, abs_tol);
    lo = s;
  }
  if (lo < b) total += integrate(f, lo, b, abs_tol);
  return total;
}

/// Bisection for a root of f in [lo, hi]; requires a sign change (or a zero endpoint).
/// Returns the midpoint of the final bracket of width <= x_tol.
template <class F>
double bisectRoot(F&& f, double lo, double hi, double flo, double fhi, double x_tol) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) != (fmid < 0.0)) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Locate sign changes of f on [a, b] scanning n uniform cells, refining each
/// bracket by bisection.  Misses pairs of roots inside one cell, so callers
/// choose n from the known smoothness scale.
template <class F>
std::vector<double> signChangeRoots(F&& f, double a, double b, int n, double x_tol) {
  std::vector<double> roots;
  if (!(b > a) || n < 1) return roots;
  const double h = (b - a) / n;
  double x0 = a;
  double f0 = f(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = (i == n) ? b : a + i * h;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0)) {
      roots.push_back(bisectRoot(f, x0, x1, f0, f1, x_tol));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(x0);
  return roots;
}

}  // namespace zeta
