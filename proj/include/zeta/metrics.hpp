#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zeta/constants.hpp"
#include "zeta/error.hpp"
#include "zeta/gfun.hpp"
#include "zeta/measure.hpp"
#include "zeta/report.hpp"
#include "zeta/search.hpp"
#include "zeta/special.hpp"

namespace zeta {

namespace detail {

inline void requireMassZero(const SignedMeasure& m, const char* who) {
  require(std::abs(m.mass()) <= 1e-12 * (1.0 + m.weightL1()), Err::mass_not_zero,
          std::string(who) + ": total mass must vanish");
}

inline void requireMomentsZero(const SignedMeasure& m, int up_to, const char* who) {
  const double scale = 1.0 + m.weightL1() + nuR(m, std::min(up_to, 3));
  for (int k = 0; k <= up_to; ++k) {
    require(std::abs(rawMoment(m, k)) <= 1e-10 * scale, Err::moments_not_zero,
            std::string(who) + ": moment mu_" + std::to_string(k) + " must vanish");
  }
}

/// Antiderivative of the Gaussian part of F_M.
inline double gaussCdfAnti(const SignedMeasure& m, double x) {
  double s = 0.0;
  for (const auto& g : m.gaussians()) s += g.w * g.sd * PhiInt((x - g.mean) / g.sd);
  return s;
}

}  // namespace detail

/// Kolmogorov norm sup_x |F_M(x)| for mass-zero M.  Candidates: atom locations
/// (both one-sided limits), stationary points of the continuous part (zeros of
/// the Gaussian-part density, bisected), and a uniform grid over the 12-sd
/// hull; the best few are refined locally.  The result is a lower-certified
/// maximum (every candidate is an exact evaluation of |F|).
inline double kolmogorov(const SignedMeasure& m_in) {
  detail::requireMassZero(m_in, "kolmogorov");
  if (m_in.empty()) return 0.0;
  const auto [m, prune_err] = pruneComponents(m_in, 1e-15);
  (void)prune_err;  // <= 1e-15 of the weight scale, far below the 1e-10 refinement floor
  if (m.empty()) return 0.0;

  std::vector<double> cand;
  for (const auto& a : m.atoms()) cand.push_back(a.x);
  for (double r : detail::gaussPartRoots(m)) cand.push_back(r);
  const auto [lo, hi] = supportHull(m, 12.0);
  for (int i = 0; i <= 2048; ++i) cand.push_back(lo + (hi - lo) * i / 2048.0);

  auto absF = [&](double x) { return std::abs(m.cdf(x)); };
  struct Scored {
    double x;
    double v;
  };
  std::vector<Scored> scored;
  scored.reserve(cand.size() + m.atoms().size());
  for (double x : cand) scored.push_back({x, absF(x)});
  for (const auto& a : m.atoms()) scored.push_back({a.x, std::abs(m.cdf(a.x) - a.w)});
  std::sort(scored.begin(), scored.end(), [](const Scored& l, const Scored& r) { return l.v > r.v; });

  double best = scored.empty() ? 0.0 : scored.front().v;
  const double spacing = (hi - lo) / 2048.0;
  const int topk = std::min<std::size_t>(8, scored.size());
  for (int i = 0; i < topk; ++i) {
    auto neg = [&](double x) { return -absF(x); };
    const MinResult r = goldenMin(neg, scored[i].x - spacing, scored[i].x + spacing, 1e-13);
    best = std::max(best, -r.value);
  }
  return best;
}

/// zeta_1(M) = int |F_M| dx for mass-zero M with nu_1 finite.  Piecewise exact:
/// between atoms and stationary points F is monotone, so each sign change is
/// bracketed by bisection and each signed piece integrates through the
/// antiderivative identity int Phi = x Phi(x) + phi(x).  Absolute error ~1e-11.
inline double zeta1Exact(const SignedMeasure& m_in) {
  detail::requireMassZero(m_in, "zeta1");
  if (m_in.empty()) return 0.0;
  const auto [m, prune_err] = pruneComponents(m_in, 1e-15);
  (void)prune_err;
  if (m.empty()) return 0.0;

  const auto [wlo, whi] = supportHull(m, 13.0);

  // event points: atoms and density zeros slice the window into stretches on
  // which F is continuous and monotone
  std::vector<double> events;
  events.push_back(wlo);
  events.push_back(whi);
  for (const auto& a : m.atoms()) {
    if (a.x > wlo && a.x < whi) events.push_back(a.x);
  }
  for (double r : detail::gaussPartRoots(m)) {
    if (r > wlo && r < whi) events.push_back(r);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  auto F = [&](double x) { return m.cdf(x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const double a = events[i];
    const double b = events[i + 1];
    double fa = F(a);                          // right limit at a
    double fb = F(b) - m.atomWeightAt(b);      // left limit at b
    std::vector<double> cuts{a};
    if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
      cuts.push_back(bisectRoot(F, a, b, fa, fb, 1e-13 * (1.0 + std::abs(a))));
    }
    cuts.push_back(b);
    const double prefix = m.atomCdf(0.5 * (a + b));
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double piece = prefix * (cuts[j + 1] - cuts[j]) +
                           detail::gaussCdfAnti(m, cuts[j + 1]) - detail::gaussCdfAnti(m, cuts[j]);
      total += std::abs(piece);
    }
  }
  return total;
}

struct ZetaEstimate {
  double value = 0.0;
  std::string method;
  bool heuristic = false;  // lower bound relies on unbounded test functions with bounded g
};

/// Analytic upper bound for zeta_{m,g}(M) on M_{m,m}: the variation integral
/// of the m-th primitive, intersected with the nu_{m+delta} moment route when
/// g is a power and with the zeta_{2+delta} comparison for the capped moduli.
inline ZetaEstimate zetaUpperEstimate(const SignedMeasure& m, int mord, const GFun& g,
                                      double tol = 1e-12) {
  detail::requireMomentsZero(m, mord, "zeta_upper");
  ZetaEstimate best;
  double fact = 1.0;
  for (int j = 2; j <= mord; ++j) fact *= j;
  const double H = std::max(g.eval(1.0), 1e-300) / fact;
  best.value = integrateVariation(
      m, [&](double x) { return g.primitive(mord, std::abs(x)); }, tol, H, mord + 1);
  best.method = "nu0_primitive";
  if (g.kind() == GFun::Kind::power) {
    const double delta = g.param1();
    double prod = 1.0;
    for (int j = 1; j <= mord; ++j) prod *= (j + delta);
    const double v = nuR(m, mord + delta) / prod;
    if (v < best.value) best = {v, "nu_moment", false};
  }
  if (g.kind() == GFun::Kind::min_id_power && mord == 2) {
    const double delta = g.param1();
    const double v = nuR(m, 2.0 + delta) / ((1.0 + delta) * (2.0 + delta));
    if (v < best.value) best = {v, "nu_moment_2+delta", false};
  }
  return best;
}

inline double zetaUpper(const SignedMeasure& m, int mord, const GFun& g, double tol = 1e-12) {
  return zetaUpperEstimate(m, mord, g, tol).value;
}

/// Test-function lower bound for zeta_{2,delta}(M), M in M_{2,2}: maximum of
/// |int f dM| over the dictionary {h_delta/((1+delta)(2+delta)),
/// g^{(-2)}(|.|), rescaled f_{b,kappa}}.  For delta = 0 the modulus is bounded
/// and the unbounded test functions are only heuristically admissible; the
/// estimate is flagged accordingly.
inline ZetaEstimate zetaLowerTestFn(const SignedMeasure& m, double delta, double tol = 1e-12) {
  detail::requireMomentsZero(m, 2, "zeta_lower_testfn");
  require(delta >= 0.0 && delta <= 1.0, Err::bad_params, "zeta_lower_testfn: delta in [0,1]");
  const GFun g = GFun::MinIdPower(delta);

  ZetaEstimate best;
  best.heuristic = !g.unbounded();

  const HDelta h(delta);
  const double vh = std::abs(integrateSigned(m, [&](double x) { return h.value(x); }, tol)) /
                    h.h2const();
  best.value = vh;
  best.method = "h_delta";

  const double vp =
      std::abs(integrateSigned(m, [&](double x) { return g.primitive(2, std::abs(x)); }, tol));
  if (vp > best.value) {
    best.value = vp;
    best.method = "g_primitive";
  }

  std::vector<std::pair<double, double>> sweep = {{1.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}};
  if (delta == 1.0) {
    sweep.push_back({1.0, 0.5});
    sweep.push_back({2.0, 0.25});
  }
  for (const auto& [b, kappa] : sweep) {
    const FClip f(b, kappa);
    // g_{b,0} <= b^{1-delta} (u ^ u^delta); for delta = 1 any kappa works with scale 1
    const double scale = std::pow(b, 1.0 - delta);
    const double v =
        std::abs(integrateSigned(m, [&](double x) { return f.value(x); }, tol)) / scale;
    if (v > best.value) {
      best.value = v;
      best.method = "f_clip";
    }
  }
  if (best.heuristic) best.method += " (heuristic)";
  return best;
}

// ---------------------------------------------------------------------------
// Relation checks, each packaged as a BoundReport.
// ---------------------------------------------------------------------------

/// Regularity zeta(M1 * M2) <= zeta(M1) nu_0(M2): exact zeta_1 on both sides
/// for (m, g) = (1, identity); otherwise the verifiable ordering
/// lower(M1 * M2) <= upper(M1) nu_0(M2).
inline BoundReport verifyRegularity(const SignedMeasure& m1, const SignedMeasure& m2, int mord,
                                    const GFun& g) {
  const SignedMeasure conv = convolve(m1, m2);
  const double nu0_m2 = variationNu0(m2);
  if (mord == 1 && (g.kind() == GFun::Kind::power || g.kind() == GFun::Kind::min_id_power) &&
      g.param1() == 1.0) {
    const double lhs = zeta1Exact(conv);
    const double rhs = zeta1Exact(m1) * nu0_m2;
    return BoundReport::make("regularity_zeta1", {{"m", 1.0}}, lhs, rhs, rhs);
  }
  require(mord == 2, Err::bad_params, "verify_regularity: m must be 1 (identity) or 2");
  const double lhs = std::abs(
      integrateSigned(conv, [&](double x) { return g.primitive(2, std::abs(x)); }, 1e-12));
  const double rhs = zetaUpper(m1, mord, g) * nu0_m2;
  return BoundReport::make("regularity_estimate", {{"m", static_cast<double>(mord)}}, lhs, rhs, rhs);
}

/// Homogeneity of zeta_1: zeta_1(M(./a)) = a zeta_1(M) within 1e-9 relative.
inline BoundReport verifyHomogeneity(const SignedMeasure& m, double a) {
  require(a > 0.0, Err::bad_params, "verify_homogeneity: a must be positive");
  const double scaled = zeta1Exact(scale(m, a));
  const double direct = a * zeta1Exact(m);
  const double lhs = std::abs(scaled - direct);
  const double rhs = 1e-9 * (1.0 + direct);
  return BoundReport::make("homogeneity_zeta1", {{"a", a}}, lhs, rhs, rhs);
}

/// Smoothing inequality zeta_1(M) <= (4/sqrt(2 pi)) eps + zeta_1(M * N_eps).
inline BoundReport verifySmoothing(const SignedMeasure& m, double eps) {
  require(eps > 0.0, Err::bad_params, "verify_smoothing: eps must be positive");
  detail::requireMassZero(m, "verify_smoothing");
  const double lhs = zeta1Exact(m);
  const double rhs = constBeta() * eps + zeta1Exact(convolve(m, SignedMeasure::normal(0.0, eps)));
  return BoundReport::make("smoothing_zeta1", {{"eps", eps}}, lhs, rhs, rhs);
}

/// The two smoothing-through-zeta_{2,delta} estimates:
///   nu_0(M * N_sigma)   <= C0(delta) U / (sigma^3 ^ sigma^{2+delta})
///   zeta_1(M * N_sigma) <= C1(delta) U / (sigma^2 ^ sigma^{1+delta})
/// with U the analytic zeta_{2,delta} upper estimate.
inline std::vector<BoundReport> verifyMnSigma(const SignedMeasure& m, double sigma, double delta) {
  require(sigma > 0.0, Err::bad_params, "verify_mn_sigma: sigma must be positive");
  const double U = zetaUpper(m, 2, GFun::MinIdPower(delta));
  const SignedMeasure conv = convolve(m, SignedMeasure::normal(0.0, sigma));
  const double lhs0 = variationNu0(conv);
  const double rhs0 = constC0Delta(delta) * U / std::min(std::pow(sigma, 3.0), std::pow(sigma, 2.0 + delta));
  const double lhs1 = zeta1Exact(conv);
  const double rhs1 = constC1Delta(delta) * U / std::min(sigma * sigma, std::pow(sigma, 1.0 + delta));
  return {BoundReport::make("mn_sigma_nu0", {{"sigma", sigma}, {"delta", delta}}, lhs0, rhs0, rhs0),
          BoundReport::make("mn_sigma_zeta1", {{"sigma", sigma}, {"delta", delta}}, lhs1, rhs1, rhs1)};
}

}  // namespace zeta
