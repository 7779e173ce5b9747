#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "magfrac/harness.hpp"

using namespace magfrac;
using cplx = std::complex<double>;

TEST_CASE("sweep on the 1d linear field") {
  Domain d = Domain::interval(0, 1, 256);
  CVec g(1);
  g[0] = 1.0;
  auto u = ComplexField::linear(d, g);
  auto A = MagneticPotential::zero(1);
  auto t = bbm_sweep(u, A, d, 2.0, default_s_grid());
  REQUIRE(t.rows.size() == 6);
  for (const auto& row : t.rows) {
    double expect = 1.0 / (3.0 - 2.0 * row.s);
    CHECK(row.normalized == doctest::Approx(expect).epsilon(1e-4));
    CHECK(row.target == doctest::Approx(1.0).epsilon(1e-10));  // Q_{2,1} * 1
  }
  // pinned row
  auto it = std::find_if(t.rows.begin(), t.rows.end(),
                         [](const SweepRow& r) { return std::fabs(r.s - 0.9) < 1e-12; });
  REQUIRE(it != t.rows.end());
  CHECK(it->normalized == doctest::Approx(1.0 / 1.2).epsilon(1e-4));
}

TEST_CASE("sweep on the exactly-cancelling plane wave") {
  Domain d = Domain::interval(0, 1, 64);
  Vec a{1.5};
  auto u = ComplexField::plane_wave(d, a);
  auto A = MagneticPotential::constant(a);
  auto t = bbm_sweep(u, A, d, 2.0, {0.5, 0.7, 0.9});
  for (const auto& row : t.rows) {
    CHECK(std::fabs(row.normalized) < 1e-12);
    CHECK(row.target == doctest::Approx(0.0));
  }
}

TEST_CASE("sweep on the interval indicator uses the total-variation target") {
  Domain d = Domain::interval(-1, 1, 256);
  auto u = ComplexField::indicator(d, ShapeSet::interval(0, 1));
  auto A = MagneticPotential::zero(1);
  auto t = bbm_sweep(u, A, d, 1.0, {0.9, 0.95, 0.99});
  CHECK(t.metadata.at("target_kind") == "indicator_bv");
  for (const auto& row : t.rows) {
    double expect = 2.0 * (2.0 - std::pow(2.0, 1.0 - row.s)) / row.s;
    CHECK(row.normalized == doctest::Approx(expect).epsilon(1e-3));
    CHECK(row.target == doctest::Approx(2.0).epsilon(1e-10));  // Q_{1,1} * Per
  }
}

TEST_CASE("kernel-form normalization matches the fractional route") {
  Domain d = Domain::interval(0, 1, 128);
  auto u = ComplexField::gaussian(d, Vec{0.4}, 0.5, cplx(1.0, 0.3));
  auto A = MagneticPotential::radial(1, 0.7);
  double p = 2.0;
  auto t = bbm_sweep(u, A, d, p, {0.7, 0.9});
  for (const auto& row : t.rows) {
    RadialKernel k = RadialKernel::bbm(row.s, p, 1.25 * d.diameter(), 1);
    auto w = weighted_difference_energy(u, A, d, k, p);
    CHECK(std::fabs(w.value / p - row.normalized) <=
          1e-10 * std::max(1.0, std::fabs(row.normalized)));
  }
}

TEST_CASE("sweep validation") {
  Domain d = Domain::interval(0, 1, 32);
  auto u = ComplexField::constant(d, 1.0);
  auto A = MagneticPotential::zero(1);
  CHECK_THROWS_AS(bbm_sweep(u, A, d, 2.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(bbm_sweep(u, A, d, 2.0, {0.9, 0.8}), std::invalid_argument);
  CHECK_THROWS_AS(bbm_sweep(u, A, d, 2.0, {0.5, 1.2}), std::invalid_argument);
  auto ind = ComplexField::indicator(d, ShapeSet::interval(0.2, 0.8));
  CHECK_THROWS_AS(bbm_sweep(ind, A, d, 2.0, {0.3, 0.4}), std::invalid_argument);
}

TEST_CASE("targets are independent of s and rows stay finite") {
  Domain d = Domain::interval(0, 1, 96);
  auto u = ComplexField::gaussian(d, Vec{0.5}, 0.4);
  auto A = MagneticPotential::radial(1, 0.4);
  auto t = bbm_sweep(u, A, d, 2.0, {0.6, 0.8, 0.95});
  for (const auto& row : t.rows) {
    CHECK(std::isfinite(row.normalized));
    CHECK(row.target == doctest::Approx(t.rows.front().target));
    CHECK(row.target >= 0.0);
  }
}

TEST_CASE("extrapolation on closed-form rows") {
  SUBCASE("smooth 1d rows reach the unit limit") {
    SweepTable t;
    for (double s : {0.8, 0.9, 0.95, 0.99}) {
      SweepRow r;
      r.s = s;
      r.normalized = 1.0 / (3.0 - 2.0 * s);
      t.rows.push_back(r);
    }
    auto le = extrapolate_limit(t);
    CHECK(std::fabs(le.value - 1.0) < 1e-2);
  }
  SUBCASE("constant zero rows give a zero limit with zero residual") {
    SweepTable t;
    for (double s : {0.6, 0.8, 0.9}) {
      SweepRow r;
      r.s = s;
      r.normalized = 0.0;
      t.rows.push_back(r);
    }
    auto le = extrapolate_limit(t);
    CHECK(le.value == doctest::Approx(0.0));
    CHECK(le.residual == doctest::Approx(0.0));
  }
  SUBCASE("indicator rows reach the perimeter target") {
    SweepTable t;
    for (double s : {0.9, 0.95, 0.99}) {
      SweepRow r;
      r.s = s;
      r.normalized = 2.0 * (2.0 - std::pow(2.0, 1.0 - s)) / s;
      t.rows.push_back(r);
    }
    auto le = extrapolate_limit(t);
    CHECK(std::fabs(le.value - 2.0) < 2e-2);
  }
  SUBCASE("quadratic model is available") {
    SweepTable t;
    for (double s : {0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
      SweepRow r;
      r.s = s;
      r.normalized = 1.0 / (3.0 - 2.0 * s);
      t.rows.push_back(r);
    }
    auto le = extrapolate_limit(t, true);
    CHECK(le.model == "quadratic");
    CHECK(std::fabs(le.value - 1.0) < 5e-3);
  }
  SUBCASE("degenerate input is rejected") {
    SweepTable t;
    for (int i = 0; i < 3; ++i) {
      SweepRow r;
      r.s = 0.5;
      r.normalized = 1.0;
      t.rows.push_back(r);
    }
    CHECK_THROWS_AS(extrapolate_limit(t), std::invalid_argument);
    SweepTable small;
    small.rows.resize(2);
    CHECK_THROWS_AS(extrapolate_limit(small), std::invalid_argument);
  }
}

TEST_CASE("dropping the smallest-s row is consistent with the residual") {
  Domain d = Domain::interval(0, 1, 256);
  CVec g(1);
  g[0] = 1.0;
  auto u = ComplexField::linear(d, g);
  auto A = MagneticPotential::zero(1);
  auto t = bbm_sweep(u, A, d, 2.0, default_s_grid());
  auto le = extrapolate_limit(t);
  SweepTable t2 = t;
  t2.rows.erase(t2.rows.begin());
  auto le2 = extrapolate_limit(t2);
  CHECK(std::fabs(le.value - le2.value) < 2.0 * std::max(le.residual, le2.residual));
}

TEST_CASE("first-order system byproduct check") {
  SUBCASE("plane wave with its constant potential") {
    Domain d = Domain::interval(0, 1, 64);
    Vec a{1.2};
    auto u = ComplexField::plane_wave(d, a);
    auto A = MagneticPotential::constant(a);
    auto rep = byproduct_check(u, A, d, 2.0, {0.6, 0.9});
    CHECK(rep.hypothesis_met);
    CHECK(rep.system_verified);
    CHECK(rep.max_residual < 1e-12);
  }
  SUBCASE("constant field with no potential") {
    Domain d = Domain::interval(0, 1, 64);
    auto u = ComplexField::constant(d, cplx(0.7, -0.2));
    auto A = MagneticPotential::zero(1);
    auto rep = byproduct_check(u, A, d, 2.0, {0.6, 0.9});
    CHECK(rep.hypothesis_met);
    CHECK(rep.system_verified);
  }
  SUBCASE("negative control: energies are not small") {
    Domain d = Domain::rect(0, 1, 0, 1, 24, 24);
    auto u = ComplexField::gaussian(d, Vec{0.0, 0.0}, 1.0);
    auto A = MagneticPotential::landau(2, 1.0);
    auto rep = byproduct_check(u, A, d, 2.0, {0.7});
    CHECK_FALSE(rep.hypothesis_met);
    CHECK_FALSE(rep.system_verified);
    CHECK(rep.message.find("hypothesis not met") != std::string::npos);
  }
}

TEST_CASE("sweep table serialization") {
  SweepTable t;
  for (double s : {0.5, 0.75}) {
    SweepRow r;
    r.s = s;
    r.raw = 2 * s;
    r.normalized = (1 - s) * r.raw;
    r.target = 1.0;
    r.rel_error = std::fabs(r.normalized - 1.0);
    t.rows.push_back(r);
  }
  std::string csv = t.to_csv();
  CHECK(csv.find("s,raw,normalized,target,rel_error\n") == 0);
  CHECK(csv.find("0.75") != std::string::npos);
  std::string svg = t.to_svg();
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("target") != std::string::npos);
}
