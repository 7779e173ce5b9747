#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "magfrac/constants.hpp"
#include "magfrac/rng.hpp"
#include "oracles.hpp"

using namespace magfrac;

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("sphere rule nodes and weights") {
  for (int dim : {1, 2, 3, 4}) {
    SphereRule r = SphereRule::make(dim);
    for (const auto& n : r.nodes()) CHECK(std::fabs(n.norm() - 1.0) < 1e-14);
    CHECK(std::fabs(r.weight_sum() - sphere_area(dim)) < 1e-12 * std::max(1.0, sphere_area(dim)));
  }
}

TEST_CASE("q constant: one-dimensional two-point sum") {
  SphereRule r = SphereRule::make(1);
  CHECK(q_constant(1.0, 1, r) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(q_constant(2.0, 1, r) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("q constant: p = 2 symmetry value pi/2 in the plane") {
  SphereRule r = SphereRule::make(2);
  double q = q_constant(2.0, 2, r);
  CHECK(q == doctest::Approx(M_PI / 2.0).epsilon(1e-12));

  // independent check: 10^6-direction Monte Carlo average of |e1.h|^2
  std::mt19937_64 eng(12345);
  auto u01 = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const std::size_t n = 1000000;
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double th = 2.0 * M_PI * u01();
    double v = std::cos(th) * std::cos(th);
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n;
  double se = std::sqrt((sum2 / n - mean * mean) / n);
  double mc_q = 0.5 * mean * sphere_area(2);
  CHECK(std::fabs(mc_q - M_PI / 2.0) < 3.0 * 0.5 * sphere_area(2) * se);
}

TEST_CASE("q constant: p = 1 in the plane equals 4") {
  SphereRule r = SphereRule::make(2);
  CHECK(q_constant(1.0, 2, r) == doctest::Approx(4.0).epsilon(1e-12));
  // oracle: adaptive quadrature of |cos| over one period, split at the kinks
  double oracle = oracles::adaptive_simpson([](double t) { return std::fabs(std::cos(t)); },
                                            -M_PI / 2, M_PI / 2, 1e-12) +
                  oracles::adaptive_simpson([](double t) { return std::fabs(std::cos(t)); },
                                            M_PI / 2, 3 * M_PI / 2, 1e-12);
  CHECK(oracle == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("q constant equals |S^{N-1}|/(2N) for p = 2, N = 1..4") {
  for (int dim : {1, 2, 3, 4}) {
    SphereRule r = SphereRule::make(dim);
    double expect = sphere_area(dim) / (2.0 * dim);
    CHECK(std::fabs(q_constant(2.0, dim, r) - expect) < 1e-10 * std::max(1.0, expect));
  }
}

TEST_CASE("rotation invariance of the directional integral") {
  Rng rng(0xABCDEF);
  SUBCASE("p = 2 is invariant for every supported dimension") {
    for (int dim : {1, 2, 3, 4}) {
      SphereRule r = SphereRule::make(dim);
      Vec e1(dim);
      e1[0] = 1;
      double base = r.integrate_abs_dot_pow(e1, 2.0);
      for (int t = 0; t < 5; ++t) {
        Vec w = rng.unit_vector(dim);
        CHECK(std::fabs(r.integrate_abs_dot_pow(w, 2.0) - base) < 1e-10 * base);
      }
    }
  }
  SUBCASE("p = 1 and p = 3 in dimensions 1..3") {
    for (int dim : {1, 2, 3}) {
      SphereRule r = SphereRule::make(dim);
      for (double p : {1.0, 3.0}) {
        Vec e1(dim);
        e1[0] = 1;
        double base = r.integrate_abs_dot_pow(e1, p);
        for (int t = 0; t < 3; ++t) {
          Vec w = rng.unit_vector(dim);
          CHECK(std::fabs(r.integrate_abs_dot_pow(w, p) - base) < 1e-10 * std::max(1.0, base));
        }
      }
    }
  }
}

TEST_CASE("directional integral examples") {
  SphereRule r = SphereRule::make(2);
  SUBCASE("zero vector") {
    CVec v(2);
    CHECK(directional_integral(v, 2.0, r) == 0.0);
  }
  SUBCASE("real unit vector, p = 2") {
    CVec v(2);
    v[0] = 1.0;
    CHECK(directional_integral(v, 2.0, r) == doctest::Approx(M_PI).epsilon(1e-12));
  }
  SUBCASE("complex (1+i) e1, p = 2") {
    CVec v(2);
    v[0] = std::complex<double>(1.0, 1.0);
    CHECK(directional_integral(v, 2.0, r) == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  }
}

TEST_CASE("directional integral identity against q constant") {
  Rng rng(99);
  for (int dim : {1, 2, 3}) {
    SphereRule r = SphereRule::make(dim);
    for (double p : {1.0, 2.0, 3.0}) {
      double q = q_constant(p, dim, r);
      double tol = 10.0 * r.tolerance(p);
      for (int t = 0; t < 100; ++t) {
        CVec v(dim);
        for (int k = 0; k < dim; ++k)
          v[k] = std::complex<double>(rng.uniform(-2, 2), rng.uniform(-2, 2));
        double lhs = directional_integral(v, p, r);
        double rhs = p * q * pnorm_pow(v, p);
        CHECK(std::fabs(lhs - rhs) <= tol * std::max(1.0, std::fabs(rhs)));
      }
    }
  }
}

TEST_CASE("q constant input validation") {
  SphereRule r2 = SphereRule::make(2);
  CHECK_THROWS_AS(q_constant(0.5, 2, r2), std::invalid_argument);
  CHECK_THROWS_AS(q_constant(2.0, 3, r2), std::invalid_argument);
}

TEST_CASE("closed-form cross-check across p and N") {
  // integral |w.h|^p dH = 2 pi^{(N-1)/2} Gamma((p+1)/2) / Gamma((N+p)/2)
  auto closed = [](double p, int N) {
    return 2.0 * std::pow(M_PI, 0.5 * (N - 1)) * std::tgamma(0.5 * (p + 1.0)) /
           std::tgamma(0.5 * (N + p));
  };
  for (int dim : {1, 2, 3}) {
    SphereRule r = SphereRule::make(dim);
    for (double p : {1.0, 2.0, 3.0}) {
      double q = q_constant(p, dim, r);
      CHECK(q == doctest::Approx(closed(p, dim) / p).epsilon(1e-10));
    }
  }
}
