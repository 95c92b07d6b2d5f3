#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "zeta/error.hpp"
#include "zeta/quadrature.hpp"

namespace zeta {

/// A modulus g: [0,inf) -> [0,inf), increasing with g(u)/u decreasing and not
/// identically zero.  Variants cover the moduli used by the bounds: powers
/// u^delta, u ^ u^delta, clips u ^ b, the sloped clip u ^ ((1-k)b + ku), plus
/// positive scalings and pointwise minima.  Immutable value type.
class GFun {
 public:
  enum class Kind { power, min_id_power, clip, clip_slope, scaled, min };

  static GFun Power(double delta) {
    require(delta >= 0.0 && delta <= 1.0, Err::bad_params, "Power: delta must be in [0,1]");
    return GFun(std::make_shared<Node>(Node{Kind::power, delta, 0.0, nullptr, nullptr}));
  }

  /// (.) ^ (.)^delta; delta = 0 gives g_1 = u ^ 1.
  static GFun MinIdPower(double delta) {
    require(delta >= 0.0 && delta <= 1.0, Err::bad_params, "MinIdPower: delta must be in [0,1]");
    return GFun(std::make_shared<Node>(Node{Kind::min_id_power, delta, 0.0, nullptr, nullptr}));
  }

  /// g_b(u) = u ^ b, b >= 1.
  static GFun Clip(double b) {
    require(b >= 1.0, Err::bad_params, "Clip: b must be >= 1");
    return GFun(std::make_shared<Node>(Node{Kind::clip, b, 0.0, nullptr, nullptr}));
  }

  /// g_{b,kappa}(u) = u ^ ((1-kappa) b + kappa u), b > 0, kappa in [0,1].
  static GFun ClipSlope(double b, double kappa) {
    require(b > 0.0, Err::bad_params, "ClipSlope: b must be > 0");
    require(kappa >= 0.0 && kappa <= 1.0, Err::bad_params, "ClipSlope: kappa must be in [0,1]");
    return GFun(std::make_shared<Node>(Node{Kind::clip_slope, b, kappa, nullptr, nullptr}));
  }

  static GFun Scaled(double lambda, GFun inner) {
    require(lambda > 0.0, Err::bad_params, "Scaled: lambda must be > 0");
    if (inner.kind() == Kind::scaled) {
      return Scaled(lambda * inner.node_->p1, GFun(inner.node_->left));
    }
    if (lambda == 1.0) return inner;
    GFun g(std::make_shared<Node>(Node{Kind::scaled, lambda, 0.0, inner.node_, nullptr}));
    g.membershipCheck();
    return g;
  }

  static GFun Min(GFun g1, GFun g2) {
    GFun g(std::make_shared<Node>(Node{Kind::min, 0.0, 0.0, g1.node_, g2.node_}));
    g.membershipCheck();
    return g;
  }

  Kind kind() const { return node_->k; }
  double param1() const { return node_->p1; }
  double param2() const { return node_->p2; }
  GFun left() const { return GFun(node_->left); }
  GFun right() const { return GFun(node_->right); }

  double eval(double u) const { return evalNode(*node_, u); }

  /// Right limit g(0+); the artifact always works with the right-continuous
  /// value at zero.
  double zeroLimit() const { return zeroLimitNode(*node_); }

  bool unbounded() const { return unboundedNode(*node_); }

  /// m-th order primitive g^{(-m)}(u) with derivatives up to m-1 vanishing at
  /// zero; closed form for piecewise-power variants, quadrature for Min.
  double primitive(int m, double u) const {
    require(m >= 0, Err::bad_params, "primitive: order must be >= 0");
    require(u >= 0.0, Err::bad_params, "primitive: argument must be >= 0");
    if (m == 0) return eval(u);
    if (u == 0.0) return 0.0;
    std::vector<Piece> pieces;
    if (collectPieces(*node_, 1.0, pieces)) {
      double s = 0.0;
      for (const auto& p : pieces) {
        const double a = std::min(p.lo, u);
        const double b = std::min(p.hi, u);
        if (b > a) s += pieceIntegral(p, a, b, u, m);
      }
      return s;
    }
    double fact = 1.0;
    for (int j = 2; j < m; ++j) fact *= j;
    auto f = [&](double y) { return eval(y) * std::pow(u - y, m - 1) / fact; };
    return integrate(f, 0.0, u, 1e-12);
  }

  /// Scaled so the result takes the value 1 at u = 1.
  GFun normalized() const {
    const double g1 = eval(1.0);
    require(g1 > 0.0, Err::zero_at_one, "normalize: g(1) must be positive");
    if (g1 == 1.0) return *this;
    return Scaled(1.0 / g1, *this);
  }

  std::string str() const { return strNode(*node_); }

  /// Textual constructor syntax: power:0.5, minidpow:0.5, clip:2,
  /// clipslope:2,0.25, scaled:3,clip:2, min(clip:2,power:1).
  static GFun parse(const std::string& text) {
    std::string s;
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    return parseImpl(s);
  }

 private:
  struct Node {
    Kind k;
    double p1;
    double p2;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  // g restricted to [lo, hi) equals A y^delta + B + C y
  struct Piece {
    double lo, hi;
    double A, delta, B, C;
  };

  explicit GFun(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static double evalNode(const Node& n, double u) {
    switch (n.k) {
      case Kind::power: return n.p1 == 0.0 ? 1.0 : std::pow(u, n.p1);
      case Kind::min_id_power: return std::min(u, n.p1 == 0.0 ? 1.0 : std::pow(u, n.p1));
      case Kind::clip: return std::min(u, n.p1);
      case Kind::clip_slope: return std::min(u, (1.0 - n.p2) * n.p1 + n.p2 * u);
      case Kind::scaled: return n.p1 * evalNode(*n.left, u);
      case Kind::min: return std::min(evalNode(*n.left, u), evalNode(*n.right, u));
    }
    return 0.0;
  }

  static double zeroLimitNode(const Node& n) {
    switch (n.k) {
      case Kind::power: return n.p1 == 0.0 ? 1.0 : 0.0;
      case Kind::min_id_power:
      case Kind::clip:
      case Kind::clip_slope: return 0.0;
      case Kind::scaled: return n.p1 * zeroLimitNode(*n.left);
      case Kind::min: return std::min(zeroLimitNode(*n.left), zeroLimitNode(*n.right));
    }
    return 0.0;
  }

  static bool unboundedNode(const Node& n) {
    switch (n.k) {
      case Kind::power:
      case Kind::min_id_power: return n.p1 > 0.0;
      case Kind::clip: return false;
      case Kind::clip_slope: return n.p2 > 0.0;
      case Kind::scaled: return unboundedNode(*n.left);
      case Kind::min: return unboundedNode(*n.left) && unboundedNode(*n.right);
    }
    return false;
  }

  // Emits closed-form pieces when the variant allows it (everything except
  // Min).  The scale multiplies through A, B, C.
  static bool collectPieces(const Node& n, double scale, std::vector<Piece>& out) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (n.k) {
      case Kind::power:
        if (n.p1 == 0.0) {
          out.push_back({0.0, inf, 0.0, 0.0, scale, 0.0});
        } else {
          out.push_back({0.0, inf, scale, n.p1, 0.0, 0.0});
        }
        return true;
      case Kind::min_id_power:
        if (n.p1 == 1.0) {
          out.push_back({0.0, inf, 0.0, 0.0, 0.0, scale});
        } else {
          out.push_back({0.0, 1.0, 0.0, 0.0, 0.0, scale});
          if (n.p1 == 0.0) {
            out.push_back({1.0, inf, 0.0, 0.0, scale, 0.0});
          } else {
            out.push_back({1.0, inf, scale, n.p1, 0.0, 0.0});
          }
        }
        return true;
      case Kind::clip:
        out.push_back({0.0, n.p1, 0.0, 0.0, 0.0, scale});
        out.push_back({n.p1, inf, 0.0, 0.0, scale * n.p1, 0.0});
        return true;
      case Kind::clip_slope:
        out.push_back({0.0, n.p1, 0.0, 0.0, 0.0, scale});
        out.push_back({n.p1, inf, 0.0, 0.0, scale * (1.0 - n.p2) * n.p1, scale * n.p2});
        return true;
      case Kind::scaled: return collectPieces(*n.left, scale * n.p1, out);
      case Kind::min: return false;
    }
    return false;
  }

  // int_a^b (A y^d + B + C y) (u-y)^{m-1}/(m-1)! dy via binomial expansion.
  static double pieceIntegral(const Piece& p, double a, double b, double u, int m) {
    double fact = 1.0;
    for (int j = 2; j < m; ++j) fact *= j;
    auto S = [&](double pw) {
      double binom = 1.0;
      double upow = std::pow(u, m - 1);
      double s = 0.0;
      for (int j = 0; j <= m - 1; ++j) {
        const double e = pw + j + 1.0;
        const double term = binom * upow * (std::pow(b, e) - std::pow(a, e)) / e;
        s += (j % 2 == 0) ? term : -term;
        binom *= static_cast<double>(m - 1 - j) / (j + 1.0);
        if (u != 0.0) upow /= u;
      }
      return s / fact;
    };
    double total = 0.0;
    if (p.A != 0.0) total += p.A * S(p.delta);
    if (p.B != 0.0) total += p.B * S(0.0);
    if (p.C != 0.0) total += p.C * S(1.0);
    return total;
  }

  // Guardrail for composite variants: isotone, g(u)/u antitone, not zero,
  // spot-checked on a fixed log grid.
  void membershipCheck() const {
    double prev = eval(1e-6);
    double prev_ratio = prev / 1e-6;
    double maxv = prev;
    for (int i = 1; i < 1000; ++i) {
      const double u = 1e-6 * std::pow(1e8, i / 999.0);
      const double v = eval(u);
      require(v >= prev - 1e-12 * (1.0 + std::abs(prev)), Err::bad_params,
              "GFun: not increasing");
      const double ratio = v / u;
      require(ratio <= prev_ratio + 1e-12 * (1.0 + prev_ratio), Err::bad_params,
              "GFun: g(u)/u not decreasing");
      prev = v;
      prev_ratio = ratio;
      maxv = std::max(maxv, v);
    }
    require(maxv > 0.0, Err::bad_params, "GFun: identically zero");
  }

  static std::string numStr(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  static std::string strNode(const Node& n) {
    switch (n.k) {
      case Kind::power: return "power:" + numStr(n.p1);
      case Kind::min_id_power: return "minidpow:" + numStr(n.p1);
      case Kind::clip: return "clip:" + numStr(n.p1);
      case Kind::clip_slope: return "clipslope:" + numStr(n.p1) + "," + numStr(n.p2);
      case Kind::scaled: return "scaled:" + numStr(n.p1) + "," + strNode(*n.left);
      case Kind::min: return "min(" + strNode(*n.left) + "," + strNode(*n.right) + ")";
    }
    return {};
  }

  static double parseNumber(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    require(end == s.c_str() + s.size() && !s.empty(), Err::bad_params,
            "GFun parse: bad number '" + s + "'");
    return v;
  }

  static GFun parseImpl(const std::string& s) {
    if (s.rfind("min(", 0) == 0) {
      require(s.back() == ')', Err::bad_params, "GFun parse: missing ')'");
      const std::string body = s.substr(4, s.size() - 5);
      int depth = 0;
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '(') ++depth;
        if (body[i] == ')') --depth;
        if (body[i] == ',' && depth == 0) {
          // the comma splitting min's arguments is the first depth-0 comma
          // that leaves a parseable head on the left; scaled:3,clip:2 inside
          // min needs the second comma, so try in order
          try {
            return Min(parseImpl(body.substr(0, i)), parseImpl(body.substr(i + 1)));
          } catch (const Error&) {
            continue;
          }
        }
      }
      fail(Err::bad_params, "GFun parse: could not split min arguments in '" + s + "'");
    }
    const auto colon = s.find(':');
    require(colon != std::string::npos, Err::bad_params, "GFun parse: expected name:args in '" + s + "'");
    const std::string name = s.substr(0, colon);
    const std::string args = s.substr(colon + 1);
    if (name == "power") return Power(parseNumber(args));
    if (name == "minidpow") return MinIdPower(parseNumber(args));
    if (name == "clip") return Clip(parseNumber(args));
    if (name == "clipslope") {
      const auto comma = args.find(',');
      require(comma != std::string::npos, Err::bad_params, "GFun parse: clipslope needs b,kappa");
      return ClipSlope(parseNumber(args.substr(0, comma)), parseNumber(args.substr(comma + 1)));
    }
    if (name == "scaled") {
      const auto comma = args.find(',');
      require(comma != std::string::npos, Err::bad_params, "GFun parse: scaled needs lambda,<g>");
      return Scaled(parseNumber(args.substr(0, comma)), parseImpl(args.substr(comma + 1)));
    }
    fail(Err::bad_params, "GFun parse: unknown variant '" + name + "'");
  }

  std::shared_ptr<const Node> node_;
};

}  // namespace zeta
