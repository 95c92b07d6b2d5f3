#pragma once

#include <cmath>

#include "zeta/error.hpp"

namespace zeta {

inline constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
inline constexpr double kInvSqrtTwoPi = 0.3989422804014326779399460599344;
inline constexpr double kSqrtHalf = 0.7071067811865475244008443621048;

/// Standard normal density.
inline double phi(double z) { return kInvSqrtTwoPi * std::exp(-0.5 * z * z); }

/// Standard normal distribution function, relative error at the erfc level (~1 ulp).
inline double Phi(double z) { return 0.5 * std::erfc(-z * kSqrtHalf); }

/// Survival function 1 - Phi(z), computed without cancellation.
inline double PhiBar(double z) { return 0.5 * std::erfc(z * kSqrtHalf); }

/// Antiderivative of Phi:  d/dz [ z Phi(z) + phi(z) ] = Phi(z).
inline double PhiInt(double z) { return z * Phi(z) + phi(z); }

/// E (Z - z)_+^k for standard normal Z, k = 0, 1, 2.
inline double upperRamp0(double z) { return PhiBar(z); }
inline double upperRamp1(double z) { return phi(z) - z * PhiBar(z); }
inline double upperRamp2(double z) { return (1.0 + z * z) * PhiBar(z) - z * phi(z); }

/// E (z - Z)_+^k, by symmetry.
inline double lowerRamp0(double z) { return Phi(z); }
inline double lowerRamp1(double z) { return phi(z) + z * Phi(z); }
inline double lowerRamp2(double z) { return (1.0 + z * z) * Phi(z) + z * phi(z); }

/// Raw moment E X^k for X ~ N(mean, sd), k = 0..3.
inline double gaussRawMoment(double mean, double sd, int k) {
  const double v = sd * sd;
  switch (k) {
    case 0: return 1.0;
    case 1: return mean;
    case 2: return mean * mean + v;
    case 3: return mean * mean * mean + 3.0 * mean * v;
    default: fail(Err::bad_params, "gaussRawMoment: k must be in 0..3");
  }
}

/// Absolute moment E|X|^r for X ~ N(mean, sd) and integer r = 0..3 (folded-normal
/// closed forms).  Non-integer orders go through quadrature elsewhere.
inline double gaussAbsMomentInt(double mean, double sd, int r) {
  const double m = mean / sd;
  const double erf_term = 2.0 * Phi(m) - 1.0;  // P(|Z| <= |m|) signed
  switch (r) {
    case 0: return 1.0;
    case 1: return sd * (m * erf_term + 2.0 * phi(m));
    case 2: return mean * mean + sd * sd;
    case 3: return sd * sd * sd * ((m * m * m + 3.0 * m) * erf_term + (m * m + 2.0) * 2.0 * phi(m));
    default: fail(Err::bad_params, "gaussAbsMomentInt: r must be in 0..3");
  }
}

}  // namespace zeta
