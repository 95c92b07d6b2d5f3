#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "zeta/metrics.hpp"

using namespace zeta;

namespace {

SignedMeasure rademacher() { return SignedMeasure({{-1.0, 0.5}, {1.0, 0.5}}, {}); }

SignedMeasure qT(double t) {
  return SignedMeasure(
      {{-t, 1.0 / (2 * t * t)}, {0.0, 1.0 - 1.0 / (t * t)}, {t, 1.0 / (2 * t * t)}}, {});
}

SignedMeasure randomStdLaw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(2, 4);
  std::uniform_real_distribution<double> xd(-2.0, 2.0);
  std::uniform_real_distribution<double> wd(0.05, 1.0);
  std::uniform_real_distribution<double> sd(0.3, 1.5);
  std::uniform_int_distribution<int> ng(0, 2);
  std::vector<Atom> atoms;
  std::vector<Gaussian> gs;
  const int na = nd(rng);
  const int n_g = ng(rng);
  double total = 0.0;
  for (int i = 0; i < na; ++i) {
    atoms.push_back({xd(rng), wd(rng)});
    total += atoms.back().w;
  }
  for (int i = 0; i < n_g; ++i) {
    gs.push_back({xd(rng), sd(rng), wd(rng)});
    total += gs.back().w;
  }
  for (auto& a : atoms) a.w /= total;
  for (auto& g : gs) g.w /= total;
  return standardize(SignedMeasure(std::move(atoms), std::move(gs)));
}

// random element of M_{2,2}: standardized law minus the standard normal
SignedMeasure randomM22(std::mt19937_64& rng) {
  return randomStdLaw(rng) - SignedMeasure::stdNormal();
}

}  // namespace

TEST_CASE("kolmogorov norm") {
  SECTION("rademacher minus normal attains Phi(1) - 1/2 at the jump") {
    const double v = kolmogorov(rademacher() - SignedMeasure::stdNormal());
    CHECK(v == Catch::Approx(Phi(1.0) - 0.5).epsilon(1e-12));
  }
  SECTION("zero measure") { CHECK(kolmogorov(SignedMeasure()) == 0.0); }
  SECTION("dirac minus normal") {
    CHECK(kolmogorov(SignedMeasure::dirac(0.0) - SignedMeasure::stdNormal()) ==
          Catch::Approx(0.5).epsilon(1e-12));
  }
  SECTION("mass precondition") {
    REQUIRE_THROWS_AS(kolmogorov(SignedMeasure::dirac(1.0)), Error);
  }
}

TEST_CASE("zeta1 exact") {
  SECTION("two diracs") {
    CHECK(zeta1Exact(SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0)) ==
          Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("zero measure") { CHECK(zeta1Exact(SignedMeasure()) == 0.0); }
  SECTION("rademacher minus normal against the closed-form oracle") {
    // symmetric law: 2 int_0^1 (Phi - 1/2) + 2 int_1^inf (1 - Phi)
    const double oracle = 2.0 * (Phi(1.0) + phi(1.0) - phi(0.0) - 0.5) +
                          2.0 * (phi(1.0) - PhiBar(1.0));
    CHECK(zeta1Exact(rademacher() - SignedMeasure::stdNormal()) ==
          Catch::Approx(oracle).epsilon(1e-11));
  }
  SECTION("mass precondition") {
    REQUIRE_THROWS_AS(zeta1Exact(SignedMeasure::dirac(1.0)), Error);
  }
}

TEST_CASE("zeta upper estimates") {
  const SignedMeasure m = rademacher() - SignedMeasure::stdNormal();
  SECTION("zeta_3 route: nu_3 / 6") {
    const double expect = (1.0 + 4.0 / kSqrtTwoPi) / 6.0;
    CHECK(zetaUpper(m, 2, GFun::MinIdPower(1.0)) == Catch::Approx(expect).epsilon(1e-10));
    CHECK(zetaUpper(m, 2, GFun::Power(1.0)) == Catch::Approx(expect).epsilon(1e-10));
  }
  SECTION("zero measure") { CHECK(zetaUpper(SignedMeasure(), 2, GFun::MinIdPower(0.5)) == 0.0); }
  SECTION("upper estimate is monotone in delta on fixed M") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 5; ++trial) {
      const SignedMeasure mm = randomM22(rng);
      double prev = -1.0;
      for (double d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double v = zetaUpper(mm, 2, GFun::MinIdPower(d));
        CHECK(v >= prev - 1e-10);
        prev = v;
      }
    }
  }
  SECTION("zeta_{2,delta} upper never exceeds the zeta_3 upper") {
    std::mt19937_64 rng(102);
    for (int trial = 0; trial < 8; ++trial) {
      const SignedMeasure mm = randomM22(rng);
      const double v3 = zetaUpper(mm, 2, GFun::MinIdPower(1.0));
      for (double d : {0.0, 0.5}) {
        CHECK(zetaUpper(mm, 2, GFun::MinIdPower(d)) <= v3 + 1e-10);
      }
    }
  }
  SECTION("moment precondition") {
    REQUIRE_THROWS_AS(zetaUpper(rademacher(), 2, GFun::MinIdPower(1.0)), Error);
  }
}

TEST_CASE("zeta lower test-function estimates") {
  SECTION("zero measure") {
    CHECK(zetaLowerTestFn(SignedMeasure(), 0.5).value == 0.0);
  }
  SECTION("rademacher minus normal at delta = 1 attains the |x|^3/6 value") {
    const SignedMeasure m = rademacher() - SignedMeasure::stdNormal();
    const double hval = std::abs(1.0 - 4.0 / kSqrtTwoPi) / 6.0;
    const ZetaEstimate est = zetaLowerTestFn(m, 1.0);
    CHECK(est.value == Catch::Approx(hval).epsilon(1e-9));
    CHECK_FALSE(est.heuristic);
  }
  SECTION("delta = 0 lower bounds are flagged heuristic") {
    const SignedMeasure m = rademacher() - SignedMeasure::stdNormal();
    CHECK(zetaLowerTestFn(m, 0.0).heuristic);
  }
  SECTION("sandwich soundness on random instances") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 12; ++trial) {
      const SignedMeasure m = randomM22(rng);
      for (double d : {0.0, 0.5, 1.0}) {
        const double lo = zetaLowerTestFn(m, d).value;
        const double hi = zetaUpper(m, 2, GFun::MinIdPower(d));
        CHECK(lo <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("h_delta properties") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> xd(-8.0, 8.0);
  SECTION("dominates |x|^{2+delta} on a dense grid") {
    for (double d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const HDelta h(d);
      for (int i = 0; i <= 4000; ++i) {
        const double x = -10.0 + 20.0 * i / 4000.0;
        CHECK(h.value(x) >= std::pow(std::abs(x), 2.0 + d) - 1e-12);
      }
    }
  }
  SECTION("second derivative has the right modulus") {
    for (double d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const HDelta h(d);
      for (int i = 0; i < 100000; ++i) {
        const double x = xd(rng), y = xd(rng);
        const double lhs = std::abs(h.d2(x) - h.d2(y));
        const double u = std::abs(x - y);
        const double rhs = h.h2const() * std::min(std::pow(u, d), u);
        CHECK(lhs <= rhs + 1e-12);
      }
    }
  }
  SECTION("h_1 is |x|^3 and h_0 is x^2") {
    const HDelta h1(1.0), h0(0.0);
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.7, 1.0, 3.2}) {
      CHECK(h1.value(x) == Catch::Approx(std::abs(x * x * x)).margin(1e-14));
      CHECK(h0.value(x) == Catch::Approx(x * x).margin(1e-14));
    }
  }
}

TEST_CASE("f_{b,kappa} derivative identities") {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> xd(-12.0, 12.0);
  for (const auto& [b, kappa] : std::vector<std::pair<double, double>>{
           {1.0, 0.0}, {2.0, 0.25}, {1000.0, 0.01}, {3.0, 1.0}}) {
    const FClip f(b, kappa);
    const GFun g = GFun::ClipSlope(b, kappa);
    CHECK(f.value(0.0) == 0.0);
    CHECK(f.d1(0.0) == 0.0);
    CHECK(f.d2(0.0) == 0.0);
    for (int i = 0; i < 2000; ++i) {
      const double x = xd(rng);
      CHECK(f.d2(x) == Catch::Approx(g.eval(std::abs(x))).margin(1e-13));
      // finite-difference crosschecks
      const double h = 1e-5 * (1.0 + std::abs(x));
      const double fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
      CHECK(fd1 == Catch::Approx(f.d1(x)).margin(1e-5 * (1.0 + std::abs(f.d1(x)))));
      const double fd2 = (f.d1(x + h) - f.d1(x - h)) / (2.0 * h);
      CHECK(fd2 == Catch::Approx(f.d2(x)).margin(1e-5 * (1.0 + std::abs(f.d2(x)))));
    }
    // f <= |x|^3 / 6
    for (int i = 0; i < 2000; ++i) {
      const double x = xd(rng);
      CHECK(f.value(x) <= std::pow(std::abs(x), 3.0) / 6.0 + 1e-12);
    }
  }
}

TEST_CASE("regularity") {
  SECTION("exact zeta1 instance") {
    const SignedMeasure m1 = SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0);
    const SignedMeasure m2 = SignedMeasure({{0.0, 0.5}, {5.0, 0.5}}, {});
    const BoundReport r = verifyRegularity(m1, m2, 1, GFun::Power(1.0));
    CHECK(r.valid);
    CHECK(r.lhs == Catch::Approx(1.0).epsilon(1e-11));
    CHECK(r.rhs_upper == Catch::Approx(1.0).epsilon(1e-11));
  }
  SECTION("translation gives equality") {
    const SignedMeasure m1 = SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0);
    const BoundReport r = verifyRegularity(m1, SignedMeasure::dirac(2.5), 1, GFun::Power(1.0));
    CHECK(r.valid);
    CHECK(r.lhs == Catch::Approx(r.rhs_upper).epsilon(1e-11));
  }
  SECTION("zero measure") {
    const BoundReport r =
        verifyRegularity(SignedMeasure(), SignedMeasure::dirac(1.0), 1, GFun::Power(1.0));
    CHECK(r.valid);
    CHECK(r.lhs == 0.0);
  }
  SECTION("estimate form on random M_{2,2} instances") {
    std::mt19937_64 rng(106);
    for (int trial = 0; trial < 6; ++trial) {
      const SignedMeasure m1 = randomM22(rng);
      const SignedMeasure m2 = randomStdLaw(rng);
      const BoundReport r = verifyRegularity(m1, m2, 2, GFun::MinIdPower(0.5));
      CHECK(r.valid);
    }
  }
}

TEST_CASE("homogeneity of zeta1") {
  const SignedMeasure m = SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0);
  CHECK(verifyHomogeneity(m, 1.0).valid);
  SECTION("a = 2 doubles the distance") {
    CHECK(zeta1Exact(scale(m, 2.0)) == Catch::Approx(2.0).epsilon(1e-11));
    CHECK(verifyHomogeneity(m, 2.0).valid);
  }
  SECTION("random mixtures at a = 0.37") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 8; ++trial) {
      CHECK(verifyHomogeneity(randomM22(rng), 0.37).valid);
    }
  }
}

TEST_CASE("smoothing inequality") {
  SECTION("zero measure") { CHECK(verifySmoothing(SignedMeasure(), 0.5).valid); }
  SECTION("two diracs at eps = 0.5") {
    const SignedMeasure m = SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0);
    const BoundReport r = verifySmoothing(m, 0.5);
    CHECK(r.valid);
    CHECK(r.lhs == Catch::Approx(1.0).epsilon(1e-11));
    CHECK(r.rhs_upper >= 1.0);
  }
  SECTION("eps to zero recovers the left side") {
    const SignedMeasure m = SignedMeasure::dirac(0.0) - SignedMeasure::dirac(1.0);
    const BoundReport r = verifySmoothing(m, 1e-4);
    CHECK(r.valid);
    CHECK(r.rhs_upper - r.lhs <= 1e-3);
  }
}

TEST_CASE("smoothing through zeta_{2,delta}") {
  SECTION("zero measure") {
    for (const auto& r : verifyMnSigma(SignedMeasure(), 1.0, 1.0)) {
      CHECK(r.valid);
      CHECK(r.lhs == 0.0);
    }
  }
  SECTION("rademacher minus normal at sigma = 1, delta = 1") {
    const SignedMeasure m = rademacher() - SignedMeasure::stdNormal();
    for (const auto& r : verifyMnSigma(m, 1.0, 1.0)) CHECK(r.valid);
  }
  SECTION("both branches of the sigma minimum") {
    const SignedMeasure m = rademacher() - SignedMeasure::stdNormal();
    for (double sigma : {0.5, 2.0}) {
      for (double delta : {0.25, 0.75}) {
        for (const auto& r : verifyMnSigma(m, sigma, delta)) CHECK(r.valid);
      }
    }
  }
}

TEST_CASE("kolmogorov norm vs variation for differences of laws") {
  std::mt19937_64 rng(108);
  for (int trial = 0; trial < 10; ++trial) {
    const SignedMeasure m = randomStdLaw(rng) - randomStdLaw(rng);
    CHECK(kolmogorov(m) <= 0.5 * variationNu0(m) + 1e-9);
  }
}

TEST_CASE("zeta1 distance to normality is uniformly bounded") {
  std::mt19937_64 rng(109);
  const double bound = 1.0 + 2.0 / kSqrtTwoPi;
  for (int trial = 0; trial < 10; ++trial) {
    const SignedMeasure m = randomStdLaw(rng) - SignedMeasure::stdNormal();
    CHECK(zeta1Exact(m) <= bound + 1e-9);
  }
}

TEST_CASE("q_t family moments") {
  const SignedMeasure q = qT(2.0);
  CHECK(rawMoment(q, 1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(rawMoment(q, 2) == Catch::Approx(1.0).epsilon(1e-15));
}
