#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "zeta/error.hpp"
#include "zeta/gfun.hpp"
#include "zeta/measure.hpp"
#include "zeta/metrics.hpp"
#include "zeta/report.hpp"

namespace zeta {

struct GridSpec {
  double left = -1.0;
  double right = 1.0;
  int points = 257;

  double h() const { return (right - left) / (points - 1); }
  double node(int i) const { return left + i * h(); }

  void validate() const {
    require(left < right, Err::bad_params, "GridSpec: left must be < right");
    require(points >= 3, Err::bad_params, "GridSpec: need at least 3 points");
    require(points <= 4096, Err::bad_params, "GridSpec: points cap is 4096");
  }
};

/// Symmetric window over the 12-sd hull of the measure's support.
inline GridSpec defaultGrid(const SignedMeasure& m, int points = 257) {
  const auto [lo, hi] = supportHull(m, 12.0);
  const double w = std::max({std::abs(lo), std::abs(hi), 1.0});
  return GridSpec{-w, w, points};
}

namespace detail {

// minimize sum f_ij c(|i-j|) over flows with divergence e (balanced); the
// final potentials p satisfy p(j) - p(i) <= cost(i,j) for every ordered pair,
// with equality on flow-carrying arcs, so s = -p solves
// max sum e_i s_i over |s_i - s_j| <= cost(i,j).
class LineTransport {
 public:
  LineTransport(std::vector<double> excess, const std::vector<double>& cost_by_dist)
      : e_(std::move(excess)), gd_(cost_by_dist), n_(static_cast<int>(e_.size())), p_(n_, 0.0) {}

  std::vector<double> solve() {
    double cmax = 0.0;
    for (double v : e_) cmax = std::max(cmax, std::abs(v));
    // nodes below the dust thresholds are left unshipped; this perturbs only
    // the solver's optimality, never the certified (recomputed) objective
    tgt_eps_ = 1e-15 * std::max(cmax, 1e-300);
    src_eps_ = n_ * tgt_eps_;
    rev_.assign(n_, {});
    int guard = 50 * n_ + 1000;
    while (true) {
      double mx = 0.0;
      for (double v : e_) mx = std::max(mx, v);
      if (mx <= src_eps_) break;
      require(guard-- > 0, Err::solver_failure, "transport: too many augmentations");
      augment();
    }
    std::vector<double> s(n_);
    for (int i = 0; i < n_; ++i) s[i] = -p_[i];
    return s;
  }

 private:
  double cost(int i, int j) const { return gd_[static_cast<std::size_t>(std::abs(i - j))]; }

  static std::int64_t key(int i, int j) { return static_cast<std::int64_t>(i) * (1 << 20) + j; }

  double flowAt(int i, int j) const {
    const auto it = flow_.find(key(i, j));
    return it == flow_.end() ? 0.0 : it->second;
  }

  // one multi-source Dijkstra (dense) plus augmentation
  void augment() {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n_, inf);
    std::vector<int> par(n_, -1);
    std::vector<bool> done(n_, false);
    for (int i = 0; i < n_; ++i) {
      if (e_[i] > src_eps_) dist[i] = 0.0;
    }
    int target = -1;
    double dt = inf;
    for (int iter = 0; iter < n_; ++iter) {
      int u = -1;
      double du = inf;
      for (int i = 0; i < n_; ++i) {
        if (!done[i] && dist[i] < du) {
          du = dist[i];
          u = i;
        }
      }
      if (u < 0) break;
      done[u] = true;
      if (e_[u] < -tgt_eps_) {
        target = u;
        dt = du;
        break;
      }
      // forward arcs u -> v, reduced cost = cost + p(u) - p(v); sources keep
      // dist 0 (a shortest path never needs to pass through one)
      for (int v = 0; v < n_; ++v) {
        if (done[v] || e_[v] > src_eps_) continue;
        const double nd = du + cost(u, v) + p_[u] - p_[v];
        if (nd < dist[v] - 1e-18) {
          dist[v] = nd;
          par[v] = u;
        }
      }
      // backward arcs u -> v for flow v -> u
      for (int v : rev_[u]) {
        if (done[v] || e_[v] > src_eps_ || flowAt(v, u) <= 0.0) continue;
        const double nd = du - cost(v, u) + p_[u] - p_[v];
        if (nd < dist[v] - 1e-18) {
          dist[v] = nd;
          par[v] = u;
        }
      }
    }
    require(target >= 0, Err::solver_failure, "transport: no augmenting path");
    for (int i = 0; i < n_; ++i) p_[i] += std::min(dist[i], dt);

    // bottleneck along the path
    double delta = -e_[target];
    int v = target;
    while (par[v] >= 0) {
      const int u = par[v];
      const double back = flowAt(v, u);
      if (back > 0.0) delta = std::min(delta, back);
      v = u;
    }
    delta = std::min(delta, e_[v]);
    // push
    v = target;
    while (par[v] >= 0) {
      const int u = par[v];
      const double back = flowAt(v, u);
      if (back > 0.0) {
        setFlow(v, u, back - delta);
      } else {
        setFlow(u, v, flowAt(u, v) + delta);
      }
      v = u;
    }
    e_[v] -= delta;
    e_[target] += delta;
  }

  void setFlow(int i, int j, double f) {
    if (f <= 1e-300) {
      flow_.erase(key(i, j));
      return;
    }
    auto [it, inserted] = flow_.insert_or_assign(key(i, j), f);
    (void)it;
    if (inserted) rev_[j].push_back(i);
  }

  std::vector<double> e_;
  const std::vector<double>& gd_;
  int n_;
  std::vector<double> p_;
  double src_eps_ = 0.0;
  double tgt_eps_ = 0.0;
  std::unordered_map<std::int64_t, double> flow_;
  std::vector<std::vector<int>> rev_;
};

inline constexpr double kGL12Nodes[6] = {0.1252334085114689, 0.3678314989981802,
                                         0.5873179542866175, 0.7699026741943047,
                                         0.9041172563704749, 0.9815606342467192};
inline constexpr double kGL12Weights[6] = {0.2491470458134028, 0.2334925365383548,
                                           0.2031674267230659, 0.1600783285433462,
                                           0.1069393259953184, 0.0471753363865118};

/// int_t^inf (x - t) dM(x); equals the same integral over x < t in sign when
/// mu_0 = mu_1 = 0, making it the m = 2 objective kernel on the whole line.
inline double upperPartialMoment1(const SignedMeasure& m, double t) {
  double s = 0.0;
  for (const auto& a : m.atoms()) {
    if (a.x > t) s += a.w * (a.x - t);
  }
  for (const auto& g : m.gaussians()) s += g.w * g.sd * upperRamp1((t - g.mean) / g.sd);
  return s;
}

/// Objective kernel K_m for the f^{(m)} parameterisation, valid once the first
/// m moments of M vanish:  int f dM = int f^{(m)}(t) K_m(t) dt.
inline double objectiveKernel(const SignedMeasure& m, int deriv_order, double t) {
  if (deriv_order == 1) return -m.cdf(t);
  return upperPartialMoment1(m, t);
}

}  // namespace detail

/// Grid values of f^{(m)} together with the certified objective obtained from
/// a modulus-preserving extension.
struct DualCertificate {
  GridSpec grid;
  int deriv_order;
  GFun g;
  std::vector<double> values;
  double objective = 0.0;
  bool heuristic = false;  // bounded modulus: lower bound meaningful only heuristically

  /// f^{(m)} extension: the McShane envelope min_i(s_i + g(|t - x_i|)), which
  /// agrees with the grid values and satisfies the modulus bound globally.
  /// For constant moduli that envelope degenerates, and clamped linear
  /// interpolation (global oscillation <= g) is used instead.
  double extension(double t) const {
    const int n = grid.points;
    if (g.zeroLimit() > 0.0) {
      if (t <= grid.left) return values.front();
      if (t >= grid.right) return values.back();
      const double u = (t - grid.left) / grid.h();
      const int i = std::min(static_cast<int>(u), n - 2);
      const double frac = u - i;
      return values[i] * (1.0 - frac) + values[i + 1] * frac;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      best = std::min(best, values[i] + g.eval(std::abs(t - grid.node(i))));
    }
    return best;
  }

  std::string toCsv() const {
    std::string out = "x,s\n";
    char buf[80];
    for (int i = 0; i < grid.points; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid.node(i), values[i]);
      out += buf;
    }
    return out;
  }
};

namespace detail {

/// int f_hat dM for the extension, through the kernel identity (m >= 1) or
/// directly (m = 0).
inline double extensionObjective(const SignedMeasure& m, const DualCertificate& cert, double tol) {
  if (cert.deriv_order == 0) {
    double s = 0.0;
    for (const auto& a : m.atoms()) s += a.w * cert.extension(a.x);
    for (const auto& g : m.gaussians()) {
      auto f = [&](double x) { return cert.extension(x) * phi((x - g.mean) / g.sd) / g.sd; };
      s += g.w * integrate(f, g.mean - 13.0 * g.sd, g.mean + 13.0 * g.sd, tol);
    }
    return s;
  }
  const auto [hlo, hhi] = supportHull(m, 13.0);
  const double lo = std::min(hlo, cert.grid.left);
  const double hi = std::max(hhi, cert.grid.right);
  std::vector<double> splits;
  for (int i = 0; i < cert.grid.points; ++i) splits.push_back(cert.grid.node(i));
  for (const auto& a : m.atoms()) splits.push_back(a.x);
  auto f = [&](double t) { return cert.extension(t) * objectiveKernel(m, cert.deriv_order, t); };
  const double piece_tol = tol / static_cast<double>(splits.size() + 2);
  return integrateSplit(f, lo, hi, std::move(splits), piece_tol);
}

/// LP objective coefficients: c_i = int hat_i(t) K_m(t) dt for m >= 1 and
/// c_i = int hat_i dM for m = 0 (atoms exact, Gaussians in closed form).
inline std::vector<double> objectiveCoefficients(const SignedMeasure& m, const GridSpec& grid,
                                                 int deriv_order) {
  const int n = grid.points;
  const double h = grid.h();
  std::vector<double> c(n, 0.0);
  if (deriv_order == 0) {
    for (const auto& a : m.atoms()) {
      if (a.x < grid.left || a.x > grid.right) continue;
      const double u = (a.x - grid.left) / h;
      const int i = std::min(static_cast<int>(u), n - 2);
      const double frac = u - i;
      c[i] += a.w * (1.0 - frac);
      c[i + 1] += a.w * frac;
    }
    for (const auto& g : m.gaussians()) {
      for (int j = 0; j + 1 < n; ++j) {
        const double xa = grid.node(j);
        const double xb = grid.node(j + 1);
        const double za = (xa - g.mean) / g.sd;
        const double zb = (xb - g.mean) / g.sd;
        const double A0 = g.w * (Phi(zb) - Phi(za));
        const double A1 = g.w * (g.mean * (Phi(zb) - Phi(za)) - g.sd * (phi(zb) - phi(za)));
        c[j] += (xb * A0 - A1) / h;
        c[j + 1] += (A1 - xa * A0) / h;
      }
    }
    return c;
  }
  for (int j = 0; j + 1 < n; ++j) {
    const double xa = grid.node(j);
    const double xb = grid.node(j + 1);
    std::vector<double> cuts{xa};
    for (const auto& a : m.atoms()) {
      if (a.x > xa && a.x < xb) cuts.push_back(a.x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(xb);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
      const double half = 0.5 * (cuts[p + 1] - cuts[p]);
      if (half <= 0.0) continue;
      for (int q = 0; q < 6; ++q) {
        for (double sgn : {-1.0, 1.0}) {
          const double t = mid + sgn * half * kGL12Nodes[q];
          const double k = objectiveKernel(m, deriv_order, t) * kGL12Weights[q] * half;
          const double frac = (t - xa) / h;
          c[j] += k * (1.0 - frac);
          c[j + 1] += k * frac;
        }
      }
    }
  }
  return c;
}

}  // namespace detail

/// Certified lower bound for zeta_{m,g}(M) by maximizing the encoded
/// int f dM over grid values of f^{(m)} subject to the all-pairs modulus
/// constraints, solved as a transportation problem; the returned objective is
/// recomputed from the extension, so it is a true lower bound whenever the
/// extension is class-admissible.
inline DualCertificate lpLower(const SignedMeasure& m, const GFun& g, GridSpec grid,
                               int deriv_order = 2) {
  grid.validate();
  require(deriv_order >= 0 && deriv_order <= 2, Err::bad_params, "lpLower: order must be 0..2");
  detail::requireMomentsZero(m, deriv_order, "lp_lower");
  const auto [hlo, hhi] = supportHull(m, 12.0);
  if (!m.empty()) {
    require(grid.left <= hlo && grid.right >= hhi, Err::infeasible_grid,
            "lpLower: grid does not cover the 12-sd support hull");
  }

  const int n = grid.points;
  std::vector<double> gd(n);
  for (int k = 0; k < n; ++k) gd[k] = g.eval(k * grid.h());

  std::vector<double> c = detail::objectiveCoefficients(m, grid, deriv_order);
  double total_abs = 0.0, total = 0.0;
  for (double v : c) {
    total_abs += std::abs(v);
    total += v;
  }
  DualCertificate cert{grid, deriv_order, g, std::vector<double>(n, 0.0), 0.0, !g.unbounded()};
  if (total_abs == 0.0) return cert;

  std::vector<double> balanced = c;
  balanced[n / 2] -= total;
  detail::LineTransport solver(balanced, gd);
  std::vector<double> s = solver.solve();
  const double pin = s[n / 2];
  for (double& v : s) v -= pin;
  double cs = 0.0;
  for (int i = 0; i < n; ++i) cs += c[i] * s[i];
  if (cs < 0.0) {
    for (double& v : s) v = -v;
  }
  cert.values = std::move(s);
  cert.objective = std::max(0.0, detail::extensionObjective(m, cert, 1e-10));
  return cert;
}

/// Independent audit: all-pairs modulus constraints plus objective
/// recomputation at a finer tolerance.
inline void auditCertificate(const SignedMeasure& m, const DualCertificate& cert,
                             double pair_slack = 1e-10, double obj_slack = 1e-9) {
  const int n = cert.grid.points;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double bound = cert.g.eval(cert.grid.node(j) - cert.grid.node(i));
      require(std::abs(cert.values[i] - cert.values[j]) <= bound + pair_slack,
              Err::solver_failure, "certificate audit: pair constraint violated");
    }
  }
  const double again = std::max(0.0, detail::extensionObjective(m, cert, 1e-12));
  require(std::abs(again - cert.objective) <= obj_slack * (1.0 + std::abs(cert.objective)),
          Err::solver_failure, "certificate audit: objective recomputation mismatch");
}

/// Lift a certificate onto a finer nested grid: the extension is sampled at
/// the new nodes; the represented function (hence the objective) is unchanged.
inline DualCertificate liftCertificate(const DualCertificate& cert, const GridSpec& fine) {
  DualCertificate out{fine, cert.deriv_order, cert.g, std::vector<double>(fine.points, 0.0),
                      cert.objective, cert.heuristic};
  for (int i = 0; i < fine.points; ++i) out.values[i] = cert.extension(fine.node(i));
  return out;
}

/// Certified sandwich for zeta_{2,delta}(M): analytic upper estimate and LP
/// lower bounds on grids refined (points doubled, nested) until the relative
/// gap reaches the target or the points cap; gap_reached records the honest
/// outcome.
inline EstimateInterval lpSandwich(const SignedMeasure& m, double delta, double target_gap,
                                   int start_points = 257, int max_points = 4096) {
  const GFun g = GFun::MinIdPower(delta);
  const ZetaEstimate upper = zetaUpperEstimate(m, 2, g);
  EstimateInterval out;
  out.upper = upper.value;
  out.upper_method = upper.method;
  if (m.empty() || upper.value == 0.0) {
    out.lower = 0.0;
    out.lower_method = "trivial";
    out.gap_reached = true;
    return out;
  }

  DualCertificate best = lpLower(m, g, defaultGrid(m, start_points));
  int points = start_points;
  auto gap_ok = [&](double lo) { return (out.upper - lo) / out.upper <= target_gap; };
  while (!gap_ok(best.objective) && 2 * points - 1 <= max_points) {
    points = 2 * points - 1;
    DualCertificate next = lpLower(m, g, defaultGrid(m, points));
    if (next.objective >= best.objective) {
      best = std::move(next);
    } else {
      best = liftCertificate(best, next.grid);
    }
  }
  out.lower = std::min(best.objective, out.upper);  // quadrature noise clamp at ties
  char buf[64];
  std::snprintf(buf, sizeof(buf), "lp(points=%d)%s", points, best.heuristic ? " (heuristic)" : "");
  out.lower_method = buf;
  out.gap_reached = gap_ok(out.lower);
  out.validate();
  return out;
}

}  // namespace zeta
