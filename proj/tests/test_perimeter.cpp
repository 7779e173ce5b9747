#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "magfrac/bv.hpp"
#include "magfrac/harness.hpp"
#include "magfrac/perimeter.hpp"
#include "oracles.hpp"

using namespace magfrac;

namespace {

// closed form of the relative s-perimeter of (0,1) inside (-1,1)
double interval_perimeter_1d(double s) {
  return (2.0 - std::pow(2.0, 1.0 - s)) / (s * (1.0 - s));
}

}  // namespace

TEST_CASE("classical fractional perimeter") {
  Domain om = Domain::interval(-1, 1, 256);
  SUBCASE("empty complement gives zero") {
    auto r = classical_fractional_perimeter(ShapeSet::interval(-1, 1), om, 0.5);
    CHECK(std::fabs(r.value) < 1e-14);
  }
  SUBCASE("interval closed form") {
    for (double s : {0.5, 0.7, 0.9}) {
      auto r = classical_fractional_perimeter(ShapeSet::interval(0, 1), om, s);
      CHECK(r.value == doctest::Approx(interval_perimeter_1d(s)).epsilon(2e-3));
    }
    auto r5 = classical_fractional_perimeter(ShapeSet::interval(0, 1), om, 0.5);
    CHECK(r5.value == doctest::Approx(2.3431457).epsilon(1e-3));
  }
  SUBCASE("symmetry under complement") {
    auto rA = classical_fractional_perimeter(ShapeSet::interval(0, 1), om, 0.6);
    auto rB = classical_fractional_perimeter(ShapeSet::interval(-1, 0), om, 0.6);
    CHECK(rA.value == doctest::Approx(rB.value).epsilon(1e-10));
  }
  SUBCASE("s out of range") {
    CHECK_THROWS_AS(classical_fractional_perimeter(ShapeSet::interval(0, 1), om, 1.5),
                    std::invalid_argument);
  }
}

TEST_CASE("monotone growth toward s = 1") {
  Domain om = Domain::interval(-1, 1, 256);
  double prev = 0;
  for (double s : {0.5, 0.7, 0.9}) {
    auto r = classical_fractional_perimeter(ShapeSet::interval(0, 1), om, s);
    CHECK(r.value > prev);
    prev = r.value;
  }
}

TEST_CASE("magnetic perimeter reduces to the classical one without a potential") {
  Domain om = Domain::interval(-1, 1, 128);
  for (double s : {0.4, 0.8}) {
    auto cl = classical_fractional_perimeter(ShapeSet::interval(0, 1), om, s);
    auto mg = magnetic_fractional_perimeter(ShapeSet::interval(0, 1),
                                            MagneticPotential::zero(1), om, s);
    CHECK(std::fabs(cl.value - mg.value) <= 1e-12 * std::max(1.0, cl.value));
  }
}

TEST_CASE("magnetic perimeter of an empty set is zero") {
  Domain om = Domain::interval(-1, 1, 64);
  // a set with no overlap with the box acts as the empty set
  auto r = magnetic_fractional_perimeter(ShapeSet::interval(5, 6),
                                         MagneticPotential::constant(Vec{0.3}), om, 0.5);
  CHECK(std::fabs(r.value) < 1e-14);
}

TEST_CASE("magnetic perimeter against an independent quadrature") {
  // E = (0,1) inside (-1,1), A = 0.1 constant, s = 1/2
  Domain om = Domain::interval(-1, 1, 256);
  const double a = 0.1, s = 0.5;
  auto mg = magnetic_fractional_perimeter(ShapeSet::interval(0, 1),
                                          MagneticPotential::constant(Vec{a}), om, s);
  // same-set term: 2 int_0^1 (1-h) g1(h) h^{-1-s} dh, g1 = |1 - e^{i a h}|_1
  auto g1 = [&](double h) {
    return (1.0 - std::cos(a * h)) + std::fabs(std::sin(a * h));
  };
  double t1 = oracles::graded_integral(
      [&](double h) { return 2.0 * (1.0 - h) * g1(h) * std::pow(h, -1.0 - s); }, 0.0, 1.0);
  // plain cross term
  double t2 = interval_perimeter_1d(s);
  // phase-weighted cross term: measure m(h) = min(h, 2-h) for h in (0,2)
  auto g3 = [&](double h) { return std::fabs(std::cos(a * h)) + std::fabs(std::sin(a * h)); };
  double t3 = oracles::graded_integral(
      [&](double h) {
        double m = std::min(h, 2.0 - h);
        if (m < 0) return 0.0;
        if (h < 1.0)
          m = h;
        else
          m = 2.0 - h;
        return m * g3(h) * std::pow(h, -1.0 - s);
      },
      0.0, 2.0);
  double oracle = 0.5 * (t1 + t2 + t3);
  CHECK(std::fabs(mg.value - oracle) <=
        std::max(2.0 * mg.est_error, 2e-3 * std::fabs(oracle)));
}

TEST_CASE("half relationship with the full modulated energy") {
  Domain om = Domain::interval(-1, 1, 128);
  auto E = ShapeSet::interval(0, 1);
  auto A = MagneticPotential::constant(Vec{0.2});
  double s = 0.6;
  auto pm = magnetic_fractional_perimeter(E, A, om, s);
  auto full = fractional_magnetic_energy(ComplexField::indicator(om, E), A, om, s, 1.0);
  CHECK(2.0 * pm.value == doctest::Approx(full.value).epsilon(1e-12));
}

TEST_CASE("indicator total variation closed forms") {
  SUBCASE("no potential gives the relative perimeter") {
    Domain om = Domain::interval(-1, 1, 64);
    CHECK(indicator_bv(ShapeSet::interval(0, 1), MagneticPotential::zero(1), om) ==
          doctest::Approx(1.0));
    Domain om2 = Domain::interval(-1, 2, 96);
    CHECK(indicator_bv(ShapeSet::interval(0, 1), MagneticPotential::zero(1), om2) ==
          doctest::Approx(2.0));
  }
  SUBCASE("constant potential adds |a| |E|") {
    Domain om = Domain::interval(-1, 1, 256);
    double got = indicator_bv(ShapeSet::interval(0, 1), MagneticPotential::constant(Vec{0.3}), om);
    CHECK(got == doctest::Approx(1.3).epsilon(1e-10));
    // dual-solver cross-check
    auto u = ComplexField::indicator(om, ShapeSet::interval(0, 1));
    BvResult r = bv_dual(u, MagneticPotential::constant(Vec{0.3}), om);
    CHECK(std::fabs(r.total - got) < 0.03 * got);
  }
  SUBCASE("disk with the rotating potential") {
    Domain om = Domain::rect(-1, 1, -1, 1, 128, 128);
    double got = indicator_bv(ShapeSet::disk(Vec{0.0, 0.0}, 0.5),
                              MagneticPotential::landau(2, 1.0), om);
    CHECK(got == doctest::Approx(M_PI + M_PI / 24.0).epsilon(1e-6));
  }
  SUBCASE("square shape") {
    Domain om = Domain::rect(-1, 1, -1, 1, 64, 64);
    double got = indicator_bv(ShapeSet::square(Vec{0.0, 0.0}, 0.25),
                              MagneticPotential::zero(2), om);
    CHECK(got == doctest::Approx(2.0));  // 4 * side = 4 * 0.5
  }
}

TEST_CASE("mask shapes measure their interface on the grid") {
  SUBCASE("1d jump counting") {
    Domain cells = Domain::box_masked(1, {-1, 0, 0, 0}, {1, 0, 0, 0}, {128, 1, 1, 1},
                                      [](const Vec& x) { return x[0] > 0.0 && x[0] < 0.5; });
    auto E = ShapeSet::mask(cells);
    Domain om = Domain::interval(-1, 1, 128);
    CHECK(E.perimeter_in(om) == doctest::Approx(2.0));
  }
  SUBCASE("2d marching squares on an axis-aligned square") {
    Domain cells = Domain::box_masked(2, {-1, -1, 0, 0}, {1, 1, 0, 0}, {64, 64, 1, 1},
                                      [](const Vec& x) {
                                        return std::fabs(x[0]) < 0.5 && std::fabs(x[1]) < 0.5;
                                      });
    auto E = ShapeSet::mask(cells);
    Domain om = Domain::rect(-1, 1, -1, 1, 64, 64);
    CHECK(E.perimeter_in(om) == doctest::Approx(4.0).epsilon(0.05));
  }
  SUBCASE("2d marching squares on a disk") {
    Domain cells = Domain::box_masked(2, {-1, -1, 0, 0}, {1, 1, 0, 0}, {128, 128, 1, 1},
                                      [](const Vec& x) { return x.norm() < 0.5; });
    auto E = ShapeSet::mask(cells);
    Domain om = Domain::rect(-1, 1, -1, 1, 128, 128);
    CHECK(E.perimeter_in(om) == doctest::Approx(M_PI).epsilon(0.08));
  }
}
