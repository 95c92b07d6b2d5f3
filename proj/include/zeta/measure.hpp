#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zeta/error.hpp"
#include "zeta/gauss.hpp"
#include "zeta/quadrature.hpp"

namespace zeta {

struct Atom {
  double x{};
  double w{};
};

struct Gaussian {
  double mean{};
  double sd{};
  double w{};
};

/// Finite signed mixture of lattice atoms and Gaussian components.  This family
/// is closed under convolution, affine maps and subtraction of a normal law, so
/// convolution powers stay exact.  Values are immutable after construction; all
/// operations below are pure functions.
class SignedMeasure {
 public:
  SignedMeasure() = default;

  SignedMeasure(std::vector<Atom> atoms, std::vector<Gaussian> gaussians) {
    atoms_ = std::move(atoms);
    gaussians_ = std::move(gaussians);
    normalize();
  }

  static SignedMeasure dirac(double x, double w = 1.0) { return SignedMeasure({{x, w}}, {}); }

  static SignedMeasure normal(double mean, double sd, double w = 1.0) {
    return SignedMeasure({}, {{mean, sd, w}});
  }

  static SignedMeasure stdNormal(double w = 1.0) { return normal(0.0, 1.0, w); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Gaussian>& gaussians() const { return gaussians_; }

  bool empty() const { return atoms_.empty() && gaussians_.empty(); }

  /// Total mass mu_0.
  double mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.w;
    for (const auto& g : gaussians_) s += g.w;
    return s;
  }

  /// Sum of |weights|; upper bound for nu_0, exact unless Gaussian components
  /// of opposite signs overlap.
  double weightL1() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += std::abs(a.w);
    for (const auto& g : gaussians_) s += std::abs(g.w);
    return s;
  }

  /// F_M(x) = M((-inf, x]).
  double cdf(double x) const {
    double s = 0.0;
    // atoms_ sorted by location; prefix sums cached
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.x; });
    const auto idx = static_cast<std::size_t>(it - atoms_.begin());
    if (idx > 0) s += atom_prefix_[idx - 1];
    for (const auto& g : gaussians_) s += g.w * Phi((x - g.mean) / g.sd);
    return s;
  }

  /// Density of the Gaussian part (signed).
  double gaussDensity(double x) const {
    double s = 0.0;
    for (const auto& g : gaussians_) s += g.w / g.sd * phi((x - g.mean) / g.sd);
    return s;
  }

  /// Atom part of F_M only.
  double atomCdf(double x) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.x; });
    const auto idx = static_cast<std::size_t>(it - atoms_.begin());
    return idx > 0 ? atom_prefix_[idx - 1] : 0.0;
  }

  /// Weight of the atom exactly at x (0 if none).
  double atomWeightAt(double x) const {
    for (const auto& a : atoms_) {
      if (a.x == x) return a.w;
      if (a.x > x) break;
    }
    return 0.0;
  }

  SignedMeasure operator+(const SignedMeasure& o) const {
    std::vector<Atom> a = atoms_;
    a.insert(a.end(), o.atoms_.begin(), o.atoms_.end());
    std::vector<Gaussian> g = gaussians_;
    g.insert(g.end(), o.gaussians_.begin(), o.gaussians_.end());
    return SignedMeasure(std::move(a), std::move(g));
  }

  SignedMeasure operator-(const SignedMeasure& o) const { return *this + o * (-1.0); }

  SignedMeasure operator*(double c) const {
    std::vector<Atom> a = atoms_;
    for (auto& e : a) e.w *= c;
    std::vector<Gaussian> g = gaussians_;
    for (auto& e : g) e.w *= c;
    return SignedMeasure(std::move(a), std::move(g));
  }

 private:
  // Locations equal within 1e-12 (1 + |x|) are merged: convolution of rationals
  // can produce representationally distinct equal floats.
  void normalize() {
    for (const auto& a : atoms_) {
      require(std::isfinite(a.x) && std::isfinite(a.w), Err::bad_params,
              "SignedMeasure: non-finite atom");
    }
    for (const auto& g : gaussians_) {
      require(std::isfinite(g.mean) && std::isfinite(g.sd) && std::isfinite(g.w), Err::bad_params,
              "SignedMeasure: non-finite gaussian");
      require(g.sd > 0.0, Err::bad_params, "SignedMeasure: sd must be > 0");
    }

    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (const auto& a : atoms_) {
      if (!merged.empty() && std::abs(a.x - merged.back().x) <= 1e-12 * (1.0 + std::abs(merged.back().x))) {
        merged.back().w += a.w;
      } else {
        merged.push_back(a);
      }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Atom& a) { return a.w == 0.0; }),
                 merged.end());
    atoms_ = std::move(merged);

    std::sort(gaussians_.begin(), gaussians_.end(), [](const Gaussian& l, const Gaussian& r) {
      return l.mean != r.mean ? l.mean < r.mean : l.sd < r.sd;
    });
    std::vector<Gaussian> gm;
    gm.reserve(gaussians_.size());
    for (const auto& g : gaussians_) {
      if (!gm.empty() && std::abs(g.mean - gm.back().mean) <= 1e-12 * (1.0 + std::abs(gm.back().mean)) &&
          std::abs(g.sd - gm.back().sd) <= 1e-12 * (1.0 + gm.back().sd)) {
        gm.back().w += g.w;
      } else {
        gm.push_back(g);
      }
    }
    gm.erase(std::remove_if(gm.begin(), gm.end(), [](const Gaussian& g) { return g.w == 0.0; }), gm.end());
    gaussians_ = std::move(gm);

    atom_prefix_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_[i].w;
      atom_prefix_[i] = acc;
    }
  }

  std::vector<Atom> atoms_;
  std::vector<Gaussian> gaussians_;
  std::vector<double> atom_prefix_;
};

inline SignedMeasure operator*(double c, const SignedMeasure& m) { return m * c; }

/// Convolution: bilinear in the components.  atom*atom sums locations,
/// atom*gaussian shifts the mean, gaussian*gaussian adds means and variances.
inline SignedMeasure convolve(const SignedMeasure& m1, const SignedMeasure& m2) {
  std::vector<Atom> atoms;
  std::vector<Gaussian> gaussians;
  atoms.reserve(m1.atoms().size() * m2.atoms().size());
  gaussians.reserve(m1.atoms().size() * m2.gaussians().size() +
                    m2.atoms().size() * m1.gaussians().size() +
                    m1.gaussians().size() * m2.gaussians().size());
  for (const auto& a : m1.atoms()) {
    for (const auto& b : m2.atoms()) atoms.push_back({a.x + b.x, a.w * b.w});
    for (const auto& g : m2.gaussians()) gaussians.push_back({a.x + g.mean, g.sd, a.w * g.w});
  }
  for (const auto& g : m1.gaussians()) {
    for (const auto& b : m2.atoms()) gaussians.push_back({g.mean + b.x, g.sd, g.w * b.w});
    for (const auto& h : m2.gaussians())
      gaussians.push_back({g.mean + h.mean, std::hypot(g.sd, h.sd), g.w * h.w});
  }
  return SignedMeasure(std::move(atoms), std::move(gaussians));
}

/// n-th convolution power by binary exponentiation; M^0 = delta_0.
inline SignedMeasure power(const SignedMeasure& m, unsigned n,
                           std::size_t atom_cap = 10'000'000) {
  SignedMeasure result = SignedMeasure::dirac(0.0);
  SignedMeasure base = m;
  while (n > 0) {
    if (n & 1u) {
      result = convolve(result, base);
      require(result.atoms().size() <= atom_cap, Err::resource_cap,
              "power: atom count exceeds cap");
    }
    n >>= 1u;
    if (n > 0) {
      base = convolve(base, base);
      require(base.atoms().size() <= atom_cap, Err::resource_cap,
              "power: atom count exceeds cap");
    }
  }
  return result;
}

/// Pushforward under x -> a x (the measure M(./a)).
inline SignedMeasure scale(const SignedMeasure& m, double a) {
  require(a > 0.0, Err::bad_params, "scale: factor must be positive");
  std::vector<Atom> atoms = m.atoms();
  for (auto& e : atoms) e.x *= a;
  std::vector<Gaussian> g = m.gaussians();
  for (auto& e : g) {
    e.mean *= a;
    e.sd *= a;
  }
  return SignedMeasure(std::move(atoms), std::move(g));
}

/// Pushforward under x -> x + c.
inline SignedMeasure shift(const SignedMeasure& m, double c) {
  std::vector<Atom> atoms = m.atoms();
  for (auto& e : atoms) e.x += c;
  std::vector<Gaussian> g = m.gaussians();
  for (auto& e : g) e.mean += c;
  return SignedMeasure(std::move(atoms), std::move(g));
}

/// Raw moment mu_k, exact (k = 0..3).
inline double rawMoment(const SignedMeasure& m, int k) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.w * std::pow(a.x, k);
  for (const auto& g : m.gaussians()) s += g.w * gaussRawMoment(g.mean, g.sd, k);
  return s;
}

namespace detail {

/// Integral of h against one Gaussian component density, |h(x)| <= H (1+|x|)^p
/// with p <= 4.  Window of 12 sd, analytic remainder added on top.
template <class H>
double integrateAgainstGaussian(H&& h, double mean, double sd, double tol, double growth_H = 1.0,
                                int growth_p = 4) {
  const double lo = mean - 12.0 * sd;
  const double hi = mean + 12.0 * sd;
  auto f = [&](double x) { return h(x) * phi((x - mean) / sd) / sd; };
  const double core = integrate(f, lo, hi, tol);
  // tail:  (1+|x|)^p <= (1+|mean|+sd)^p |z|^p for |z| >= 12, and
  // int_{|z|>T} z^4 phi <= 2 (T^3 + 3T + 3) phi(T)
  const double scale = 1.0 + std::abs(mean) + sd;
  double sp = 1.0;
  for (int i = 0; i < growth_p; ++i) sp *= scale;
  const double tail = growth_H * sp * 2.0 * (12.0 * 12.0 * 12.0 + 39.0) * phi(12.0);
  return core + tail;
}

}  // namespace detail

/// nu_r(M) with the Gaussian part handled per component (closed forms for
/// integer r, quadrature otherwise).  Exact when Gaussian weights share a
/// sign; otherwise an upper bound for the true variation integral.
inline double nuR(const SignedMeasure& m, double r, double tol = 1e-12) {
  require(r >= 0.0, Err::bad_params, "nuR: order must be >= 0");
  double s = 0.0;
  for (const auto& a : m.atoms()) s += std::abs(a.w) * std::pow(std::abs(a.x), r);
  const double ri = std::round(r);
  const bool integer_r = (std::abs(r - ri) == 0.0) && ri >= 0.0 && ri <= 3.0;
  for (const auto& g : m.gaussians()) {
    double am;
    if (integer_r) {
      am = gaussAbsMomentInt(g.mean, g.sd, static_cast<int>(ri));
    } else {
      am = detail::integrateAgainstGaussian([&](double x) { return std::pow(std::abs(x), r); },
                                            g.mean, g.sd, tol);
    }
    s += std::abs(g.w) * am;
  }
  return s;
}

/// nu_{m,g}(M) = int |x|^m g(|x|) d|M|, per component like nuR.  G needs a
/// double eval(double) member; kept as a template so this header does not
/// depend on the g-family one.
template <class G>
double nuMG(const SignedMeasure& m, int mord, const G& g, double tol = 1e-12) {
  double s = 0.0;
  auto h = [&](double x) {
    const double u = std::abs(x);
    return std::pow(u, mord) * g.eval(u);
  };
  for (const auto& a : m.atoms()) s += std::abs(a.w) * h(a.x);
  // g(u) <= g(1) max(1, u) by the scaling inequality, so h grows at most like
  // degree mord+1 with constant g(1)
  const double H = std::max(g.eval(1.0), 1e-300);
  for (const auto& gc : m.gaussians()) {
    s += std::abs(gc.w) * detail::integrateAgainstGaussian(h, gc.mean, gc.sd, tol, H, mord + 1);
  }
  return s;
}

struct MomentVector {
  double mu0{}, mu1{}, mu2{}, mu3{};
  double nu_r{};
  double r{};
  double sigma{};  // NaN unless mu0 == 1
};

/// Exact mu_0..mu_3 plus nu_r; sigma is filled in the probability case.
inline MomentVector moments(const SignedMeasure& m, double r = 2.0) {
  MomentVector mv;
  mv.mu0 = rawMoment(m, 0);
  mv.mu1 = rawMoment(m, 1);
  mv.mu2 = rawMoment(m, 2);
  mv.mu3 = rawMoment(m, 3);
  mv.r = r;
  mv.nu_r = nuR(m, r);
  if (std::abs(mv.mu0 - 1.0) <= 1e-12) {
    mv.sigma = std::sqrt(std::max(0.0, mv.mu2 - mv.mu1 * mv.mu1));
  } else {
    mv.sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return mv;
}

/// Standardisation: law of (X - mu)/sigma.
inline SignedMeasure standardize(const SignedMeasure& p) {
  const MomentVector mv = moments(p);
  require(std::abs(mv.mu0 - 1.0) <= 1e-12, Err::not_a_law, "standardize: total mass must be 1");
  require(mv.sigma > 0.0, Err::degenerate_law, "standardize: sigma must be positive");
  return scale(shift(p, -mv.mu1), 1.0 / mv.sigma);
}

namespace detail {

/// Sign-change roots of the signed Gaussian-part density; sampling resolution
/// follows each component's own sd.
inline std::vector<double> gaussPartRoots(const SignedMeasure& m) {
  std::vector<double> pts;
  for (const auto& g : m.gaussians()) {
    for (int i = -48; i <= 48; ++i) pts.push_back(g.mean + g.sd * i * 0.25);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> roots;
  if (pts.size() < 2) return roots;
  auto d = [&](double x) { return m.gaussDensity(x); };
  double x0 = pts[0];
  double f0 = d(x0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double x1 = pts[i];
    const double f1 = d(x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      roots.push_back(bisectRoot(d, x0, x1, f0, f1, 1e-13 * (1.0 + std::abs(x0))));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace detail

/// Integral of h >= 0 against the variation measure |M|: atoms exactly, the
/// Gaussian part through the signed density with sign changes located by
/// bisection.  |h(x)| <= H (1+|x|)^p required for the tail remainder.
template <class H>
double integrateVariation(const SignedMeasure& m, H&& h, double tol = 1e-12, double growth_H = 1.0,
                          int growth_p = 4) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += std::abs(a.w) * h(a.x);
  const auto& gs = m.gaussians();
  if (gs.empty()) return s;
  bool mixed = false;
  for (const auto& g : gs) {
    if ((g.w < 0.0) != (gs.front().w < 0.0)) mixed = true;
  }
  if (!mixed) {
    for (const auto& g : gs) {
      s += std::abs(g.w) * detail::integrateAgainstGaussian(h, g.mean, g.sd, tol, growth_H, growth_p);
    }
    return s;
  }
  double lo = gs.front().mean - 12.0 * gs.front().sd;
  double hi = gs.front().mean + 12.0 * gs.front().sd;
  double tail = 0.0;
  for (const auto& g : gs) {
    lo = std::min(lo, g.mean - 12.0 * g.sd);
    hi = std::max(hi, g.mean + 12.0 * g.sd);
    const double scale = 1.0 + std::abs(g.mean) + g.sd;
    double sp = 1.0;
    for (int i = 0; i < growth_p; ++i) sp *= scale;
    tail += std::abs(g.w) * growth_H * sp * 2.0 * (12.0 * 12.0 * 12.0 + 39.0) * phi(12.0);
  }
  const std::vector<double> roots = detail::gaussPartRoots(m);
  auto f = [&](double x) { return std::abs(m.gaussDensity(x)) * h(x); };
  s += integrateSplit(f, lo, hi, roots, tol);
  return s + tail;
}

/// Variation norm nu_0(M).
inline double variationNu0(const SignedMeasure& m, double tol = 1e-12) {
  return integrateVariation(m, [](double) { return 1.0; }, tol, 1.0, 0);
}

/// Signed integral int h dM: atoms exactly, Gaussian components by adaptive
/// quadrature over 12 sd windows.  h must grow at most polynomially (degree
/// <= 4); the sub-1e-28 tail remainder is dropped.
template <class H>
double integrateSigned(const SignedMeasure& m, H&& h, double tol = 1e-12) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.w * h(a.x);
  for (const auto& g : m.gaussians()) {
    auto f = [&](double x) { return h(x) * phi((x - g.mean) / g.sd) / g.sd; };
    s += g.w * integrate(f, g.mean - 12.0 * g.sd, g.mean + 12.0 * g.sd, tol);
  }
  return s;
}

/// [lo, hi] covering every atom and every Gaussian mean +- k_sd standard
/// deviations; the k_sd-hull of the support.
inline std::pair<double, double> supportHull(const SignedMeasure& m, double k_sd = 12.0) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto acc = [&](double a, double b) {
    if (first) {
      lo = a;
      hi = b;
      first = false;
    } else {
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
  };
  for (const auto& a : m.atoms()) acc(a.x, a.x);
  for (const auto& g : m.gaussians()) acc(g.mean - k_sd * g.sd, g.mean + k_sd * g.sd);
  return {lo, hi};
}

/// Drop components whose combined contribution to F and to first-moment
/// integrals is below eps; returns the pruned measure and a bound on the
/// induced error in sup|F| (the integral-metric error is bounded by the same
/// budget times (1+|mean|+sd) which is already folded in).
inline std::pair<SignedMeasure, double> pruneComponents(const SignedMeasure& m, double eps) {
  double total = m.weightL1();
  if (total == 0.0) return {m, 0.0};
  std::vector<Atom> atoms;
  std::vector<Gaussian> gs;
  double dropped = 0.0;
  const double cut = eps * total;
  for (const auto& a : m.atoms()) {
    if (std::abs(a.w) * (1.0 + std::abs(a.x)) < cut / (1.0 + static_cast<double>(m.atoms().size() + m.gaussians().size()))) {
      dropped += std::abs(a.w) * (1.0 + std::abs(a.x));
    } else {
      atoms.push_back(a);
    }
  }
  for (const auto& g : m.gaussians()) {
    if (std::abs(g.w) * (1.0 + std::abs(g.mean) + g.sd) <
        cut / (1.0 + static_cast<double>(m.atoms().size() + m.gaussians().size()))) {
      dropped += std::abs(g.w) * (1.0 + std::abs(g.mean) + g.sd);
    } else {
      gs.push_back(g);
    }
  }
  return {SignedMeasure(std::move(atoms), std::move(gs)), dropped};
}

// ---------------------------------------------------------------------------
// Line-oriented text serialization:
//   atoms <k> gaussians <m>
//   A <loc> <weight>
//   G <mean> <sd> <weight>
// with >= 17 significant digits.
// ---------------------------------------------------------------------------

inline std::string toText(const SignedMeasure& m) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof(buf), "atoms %zu gaussians %zu\n", m.atoms().size(),
                m.gaussians().size());
  out += buf;
  for (const auto& a : m.atoms()) {
    std::snprintf(buf, sizeof(buf), "A %.17g %.17g\n", a.x, a.w);
    out += buf;
  }
  for (const auto& g : m.gaussians()) {
    std::snprintf(buf, sizeof(buf), "G %.17g %.17g %.17g\n", g.mean, g.sd, g.w);
    out += buf;
  }
  return out;
}

inline SignedMeasure fromText(std::istream& in) {
  std::string tok;
  std::size_t na = 0, ng = 0;
  in >> tok;
  require(tok == "atoms", Err::bad_params, "measure text: expected 'atoms'");
  in >> na >> tok >> ng;
  require(static_cast<bool>(in) && tok == "gaussians", Err::bad_params,
          "measure text: expected 'gaussians <m>'");
  std::vector<Atom> atoms;
  std::vector<Gaussian> gs;
  for (std::size_t i = 0; i < na + ng; ++i) {
    in >> tok;
    require(static_cast<bool>(in), Err::bad_params, "measure text: truncated");
    if (tok == "A") {
      Atom a;
      in >> a.x >> a.w;
      atoms.push_back(a);
    } else if (tok == "G") {
      Gaussian g;
      in >> g.mean >> g.sd >> g.w;
      gs.push_back(g);
    } else {
      fail(Err::bad_params, "measure text: unknown record '" + tok + "'");
    }
  }
  require(static_cast<bool>(in), Err::bad_params, "measure text: malformed numbers");
  return SignedMeasure(std::move(atoms), std::move(gs));
}

inline SignedMeasure fromText(const std::string& text) {
  std::istringstream in(text);
  return fromText(in);
}

}  // namespace zeta
