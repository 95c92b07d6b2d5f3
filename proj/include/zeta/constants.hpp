#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zeta/error.hpp"
#include "zeta/gauss.hpp"
#include "zeta/quadrature.hpp"
#include "zeta/search.hpp"

namespace zeta {

// ---------------------------------------------------------------------------
// Closed-form constants of the smoothing machinery.  The literal formulas are
// the single source of truth; the quadrature reproductions below are checks.
// ---------------------------------------------------------------------------

inline double constD2() { return 4.0 * std::exp(-0.5) / kSqrtTwoPi; }
inline double constD21() { return (8.0 * std::exp(-0.5) - 2.0) / kSqrtTwoPi; }
inline double constD3() { return (2.0 + 8.0 * std::exp(-1.5)) / kSqrtTwoPi; }

inline double constAlpha() { return (16.0 * std::exp(-0.5) - 4.0) / kSqrtTwoPi; }
inline double constBeta() { return 4.0 / kSqrtTwoPi; }
inline double constGamma() { return 8.0 * std::exp(-0.5) / kSqrtTwoPi; }

inline double constAlphaDelta(double delta) {
  return std::pow(constAlpha(), 1.0 - delta) * std::pow(4.0 * std::exp(-0.5) / kSqrtTwoPi, delta);
}

inline double constGammaDelta(double delta) {
  return std::pow(constGamma(), 1.0 - delta) *
         std::pow((2.0 + 8.0 * std::exp(-1.5)) / kSqrtTwoPi, delta);
}

/// nu_0(M * N_sigma) <= C0(delta) zeta_{2,delta}(M) / (sigma^3 ^ sigma^{2+delta})
inline double constC0Delta(double delta) {
  return std::pow(2.0 * constD2(), 1.0 - delta) * std::pow(constD3(), delta);
}

/// zeta_1(M * N_sigma) <= C1(delta) zeta_{2,delta}(M) / (sigma^2 ^ sigma^{1+delta})
inline double constC1Delta(double delta) {
  return std::pow(2.0 * constD21(), 1.0 - delta) * std::pow(constD2(), delta);
}

inline double constOmega() { return 25.0 / 24.0 * constBeta() + 4.0 / 27.0; }

/// Constant of the convolution step: sqrt(3) (2^{-1/4} + 1)^2 / (2 sqrt(2 pi)).
inline double constC1Conv() {
  const double t = std::pow(2.0, -0.25) + 1.0;
  return std::sqrt(3.0) * t * t / (2.0 * kSqrtTwoPi);
}

/// Universal constant of the classical bound (Korolev/Dorofeeva value).
inline constexpr double kC2Classical = 1.8546;

/// No admissible constant is smaller than sqrt(2) (15 + 6 sqrt(3)) / (13 sqrt(2 pi)).
inline double constLowerBoundC() {
  return std::sqrt(2.0) * (15.0 + 6.0 * std::sqrt(3.0)) / (13.0 * kSqrtTwoPi);
}

/// delta-dependent variant sqrt(2)^{delta-1} of the above.
inline double constLowerBoundC(double delta) {
  return std::pow(std::sqrt(2.0), delta - 1.0) * constLowerBoundC();
}

// ---------------------------------------------------------------------------
// Reproduction lab: every explicitly computed number, quadrature/optimisation
// against closed form.
// ---------------------------------------------------------------------------

struct NamedConstant {
  std::string name;
  double computed = 0.0;
  std::optional<double> closed_form;
  std::optional<double> paper_value;
  double abs_err = 0.0;

  static NamedConstant make(std::string name, double computed,
                            std::optional<double> closed_form = std::nullopt,
                            std::optional<double> paper_value = std::nullopt) {
    NamedConstant c;
    c.name = std::move(name);
    c.computed = computed;
    c.closed_form = closed_form;
    c.paper_value = paper_value;
    c.abs_err = closed_form ? std::abs(computed - *closed_form) : 0.0;
    return c;
  }
};

/// D2 = int |phi''|, D2,1 = int |z| |phi''|, D3 = int |phi'''| by quadrature
/// with sign splits at the Hermite-factor roots, against the closed forms.
inline std::vector<NamedConstant> dConstants(double tol = 1e-11) {
  const double s3 = std::sqrt(3.0);
  auto q = [&](auto f, std::vector<double> splits) {
    return integrateSplit(f, -14.0, 14.0, std::move(splits), tol);
  };
  const double d2 =
      q([](double z) { return std::abs(z * z - 1.0) * phi(z); }, {-1.0, 1.0});
  const double d21 =
      q([](double z) { return std::abs(z) * std::abs(z * z - 1.0) * phi(z); }, {-1.0, 0.0, 1.0});
  const double d3 =
      q([](double z) { return std::abs(3.0 * z - z * z * z) * phi(z); }, {-s3, 0.0, s3});
  return {NamedConstant::make("D2", d2, constD2(), 0.967882),
          NamedConstant::make("D2,1", d21, constD21(), 1.13788),
          NamedConstant::make("D3", d3, constD3(), 1.510013)};
}

inline NamedConstant c1ConvConstant() {
  return NamedConstant::make("c1", constC1Conv(), constC1Conv(), 1.1708);
}

inline NamedConstant omegaConstant() {
  return NamedConstant::make("omega", constOmega(), constOmega());
}

inline NamedConstant lowerBoundConstant() {
  return NamedConstant::make("c_lower", constLowerBoundC(), constLowerBoundC(), 1.1020);
}

namespace detail {

struct CrossingResult {
  double value;
  double zeta_star;
};

/// c(lambda) = sup_{zeta>0} min(branch1, branch2) where branch1 is increasing
/// and branch2 decreasing on (0, zeta_sing); the sup is attained at their
/// unique crossing, bracketed and bisected there.
inline CrossingResult cOfLambdaImpl(double lambda) {
  const double two_gamma = 2.0 * constGamma();
  require(lambda > two_gamma, Err::lambda_too_small,
          "c(lambda): lambda must exceed 2 gamma = 3.87153...");
  const double A = constC1Conv() * (1.0 + constAlpha() + constBeta() * lambda) / kC2Classical;
  const double B = two_gamma;
  const double C = 1.0 / (lambda * lambda);
  const double D = 6.0;
  const double E = constOmega();
  const double zeta_sing = std::sqrt(1.0 / (B * B) - C);
  auto branch1 = [&](double z) { return kC2Classical * A / (1.0 - B * std::sqrt(z * z + C)); };
  auto branch2 = [&](double z) { return kC2Classical * (D + E / z); };
  auto diff = [&](double z) { return branch1(z) - branch2(z); };
  // diff < 0 near 0 (branch2 blows up), > 0 near the singularity
  double lo = zeta_sing * 1e-12;
  double hi = zeta_sing * (1.0 - 1e-12);
  double flo = diff(lo);
  double fhi = diff(hi);
  require(flo < 0.0 && fhi > 0.0, Err::solver_failure, "c(lambda): bracket failed");
  const double zs = bisectRoot(diff, lo, hi, flo, fhi, 1e-12);
  return {branch2(zs), zs};
}

}  // namespace detail

inline NamedConstant cOfLambda(double lambda) {
  const auto r = detail::cOfLambdaImpl(lambda);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "c(lambda=%.6g)", lambda);
  return NamedConstant::make(buf, r.value, std::nullopt,
                             lambda == 8.5 ? std::optional<double>(47.10171) : std::nullopt);
}

struct OptimizedC {
  double lambda_star;
  double value;
};

/// inf over lambda in (2 gamma, 100] of c(lambda): 128-point scan on log
/// lambda seeds a golden-section refinement.
inline OptimizedC optimizeC() {
  const double lo = 2.0 * constGamma() * (1.0 + 1e-9);
  const double hi = 100.0;
  auto f = [&](double loglam) { return detail::cOfLambdaImpl(std::exp(loglam)).value; };
  const MinResult r = scanThenGoldenMin(f, std::log(lo), std::log(hi), 128, 1e-12);
  return {std::exp(r.x), r.value};
}

}  // namespace zeta
