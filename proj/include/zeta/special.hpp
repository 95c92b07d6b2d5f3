#pragma once

#include <cmath>

#include "zeta/error.hpp"

namespace zeta {

/// The comparison function h_delta: a C^2 even function dominating |x|^{2+delta}
/// whose second derivative has modulus (1+delta)(2+delta) (|.|^delta ^ |.|).
/// h_0 is x^2 and h_1 is |x|^3.
struct HDelta {
  double delta;

  explicit HDelta(double d) : delta(d) {
    require(d >= 0.0 && d <= 1.0, Err::bad_params, "HDelta: delta must be in [0,1]");
  }

  double value(double x) const {
    const double u = std::abs(x);
    if (u <= 1.0) {
      return delta * (2.0 + delta) / 3.0 * u * u * u + (1.0 - delta) * (2.0 + delta) / 2.0 * u * u;
    }
    return std::pow(u, 2.0 + delta) + delta * (1.0 - delta) / 6.0;
  }

  double d2(double x) const {
    const double u = std::abs(x);
    if (u <= 1.0) return 2.0 * delta * (2.0 + delta) * u + (1.0 - delta) * (2.0 + delta);
    return (1.0 + delta) * (2.0 + delta) * std::pow(u, delta);
  }

  /// Modulus constant: value/h2const is a test function for zeta_{2,delta}.
  double h2const() const { return (1.0 + delta) * (2.0 + delta); }
};

/// The clipped cubic f_{b,kappa} = g_{b,kappa}^{(-2)} o |.| with
/// f(0) = f'(0) = f''(0) = 0 and f''(x) = g_{b,kappa}(|x|).
struct FClip {
  double b;
  double kappa;

  FClip(double b_, double kappa_) : b(b_), kappa(kappa_) {
    require(b > 0.0, Err::bad_params, "FClip: b must be > 0");
    require(kappa >= 0.0 && kappa <= 1.0, Err::bad_params, "FClip: kappa must be in [0,1]");
  }

  double value(double x) const {
    const double u = std::abs(x);
    if (u <= b) return u * u * u / 6.0;
    const double e = u - b;
    return (1.0 - kappa) * (b * b * b / 6.0 + b * b / 2.0 * e + b / 2.0 * e * e) +
           kappa * u * u * u / 6.0;
  }

  double d1(double x) const {
    const double u = std::abs(x);
    const double s = x < 0.0 ? -1.0 : 1.0;
    if (u <= b) return s * u * u / 2.0;
    return s * ((1.0 - kappa) * (b * b / 2.0 + b * (u - b)) + kappa * u * u / 2.0);
  }

  double d2(double x) const {
    const double u = std::abs(x);
    return std::min(u, (1.0 - kappa) * b + kappa * u);
  }
};

}  // namespace zeta
