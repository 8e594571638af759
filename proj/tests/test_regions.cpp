#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "jacobi2p/random.hpp"
#include "jacobi2p/regions.hpp"
#include "jacobi2p/verify.hpp"

using namespace jacobi2p;

namespace {
const BorgData kPlain{1.0, 3.0, 0.0, -1};
}

TEST_CASE("omega constant") {
  const double t = omega_constant();
  CHECK(t == doctest::Approx(0.567).epsilon(1e-3));  // leading digits
  CHECK(std::abs(t * std::exp(t) - 1.0) <= 1e-14);
  // frozen value from a bisection oracle on [0.5, 0.6]
  double lo = 0.5, hi = 0.6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) > 1.0 ? hi : lo) = mid;
  }
  CHECK(std::abs(t - 0.5671432904097838) < 3e-16);
  CHECK(std::abs(t - lo) < 2e-15);
}

TEST_CASE("constants for s=1, d=3") {
  const RegionParams p = constants(kPlain);
  CHECK(p.K1 == doctest::Approx(432.0).epsilon(1e-14));   // 256*27/16
  CHECK(p.K2 == doctest::Approx(3888.0).epsilon(1e-13));  // 432 * 4 sqrt2 * 9 / (2 sqrt8)
  CHECK(k2_closed_form(1.0, 3.0) == doctest::Approx(3888.0).epsilon(1e-13));
  CHECK(p.tau == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(p.tau_nu_eps == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));  // nu = 0
  CHECK(p.xi == doctest::Approx(10.0 / 18.0).epsilon(1e-15));
  CHECK(std::abs(p.w2eps_nu - Complex(-2.0, 0.0)) < 1e-14);  // 1 / w^2(0), w^2(0) = -1/2
  CHECK(p.abs_w_nu_sq == doctest::Approx(0.5).epsilon(1e-14));

  const BorgData pole{1.0, 3.0, 0.0, +1};
  const RegionParams pp = constants(pole);
  CHECK(std::abs(pp.w2eps_nu - Complex(-0.5, 0.0)) < 1e-14);  // w^2(0) itself
  CHECK(pp.tau == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("k2 dual formula and tau bound") {
  Rng rng(3);
  InvariantCheck dual = checks::k2_dual_formula(rng, 100);
  CHECK_MESSAGE(dual.passed, dual.detail);
  InvariantCheck tb = checks::tau_bound(rng, 300);
  CHECK_MESSAGE(tb.passed, tb.detail);
}

TEST_CASE("disk function lower bounds") {
  Rng rng(5);
  InvariantCheck f = checks::disk_f_bound(rng, 2500);
  CHECK_MESSAGE(f.passed, f.detail);
  InvariantCheck g = checks::disk_g_bound(rng, 2500);
  CHECK_MESSAGE(g.passed, g.detail);
  // branch positive on the real diameter
  const RegionParams p = constants(kPlain);
  for (double x : {-0.9, -0.3, 0.0, 0.4, 0.9}) {
    CHECK(disk_f(Complex(x, 0.0), p).imag() == 0.0);
    CHECK(disk_g(Complex(x, 0.0), p).imag() == 0.0);
    CHECK(disk_f(Complex(x, 0.0), p).real() > 0.0);
  }
}

TEST_CASE("zero-moment criterion") {
  const RegionParams p = constants(kPlain);
  SUBCASE("worked value at lambda = 5") {
    const CriterionValue cv = criterion_zero_moment(kPlain, p, 1e-4, Complex(5.0, 0.0));
    REQUIRE(!cv.excluded);
    REQUIRE(cv.lhs.has_value());
    CHECK(*cv.lhs == doctest::Approx(0.0594).epsilon(2e-3));
    CHECK(cv.in_G);
    CHECK(cv.abs_w == doctest::Approx(0.3178372451957822).epsilon(1e-12));
  }
  SUBCASE("band edge is excluded") {
    const CriterionValue cv = criterion_zero_moment(kPlain, p, 1e-4, Complex(3.0, 0.0));
    CHECK(cv.excluded);
    CHECK(!cv.in_G);
    CHECK(!cv.lhs.has_value());
  }
  SUBCASE("nu is excluded when the Weyl function has a pole there") {
    const BorgData pole{1.0, 3.0, 0.5, +1};
    const RegionParams pp = constants(pole);
    const CriterionValue cv = criterion_zero_moment(pole, pp, 1e-4, Complex(0.5, 0.0));
    CHECK(cv.excluded);
    const CriterionValue off = criterion_zero_moment(pole, pp, 1e-4, Complex(0.8, 0.0));
    CHECK(!off.excluded);
  }
  SUBCASE("zero perturbation is everywhere in G") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      Complex z = rng.in_rect({-6.0, -6.0}, {6.0, 6.0});
      const CriterionValue cv = criterion_zero_moment(kPlain, p, 0.0, z);
      if (cv.excluded) continue;
      CHECK(*cv.lhs == 0.0);
      CHECK(cv.in_G);
    }
  }
  SUBCASE("linear in the moment") {
    Rng rng(9);
    InvariantCheck lin = checks::criterion_linearity(rng, 300);
    CHECK_MESSAGE(lin.passed, lin.detail);
  }
}

TEST_CASE("first-moment emptiness") {
  const RegionParams p = constants(kPlain);
  SUBCASE("worked value") {
    const EmptinessResult r = criterion_first_moment_empty(kPlain, p, 1e-5);
    CHECK(r.empty_guaranteed);
    CHECK(r.lhs == doctest::Approx(0.07776).epsilon(1e-10));  // 3888/0.5 * 1e-5
    CHECK(r.t == doctest::Approx(0.5671432904097838).epsilon(1e-14));
  }
  SUBCASE("large moment fails the test") {
    const EmptinessResult r = criterion_first_moment_empty(kPlain, p, 1.0);
    CHECK(!r.empty_guaranteed);
    CHECK(r.lhs == doctest::Approx(7776.0).epsilon(1e-12));
  }
  SUBCASE("zero moment passes") {
    CHECK(criterion_first_moment_empty(kPlain, p, 0.0).empty_guaranteed);
  }
  SUBCASE("rejected for a background with an eigenvalue") {
    const BorgData pole{1.0, 3.0, 0.0, +1};
    const RegionParams pp = constants(pole);
    CHECK_THROWS_AS(criterion_first_moment_empty(pole, pp, 1e-5), std::invalid_argument);
  }
}

TEST_CASE("grid scan") {
  const RegionParams p = constants(kPlain);
  SUBCASE("degenerate 1x1 grid equals the pointwise criterion") {
    GridSpec g;
    g.re0 = g.re1 = 5.0;
    g.im0 = g.im1 = 0.0;
    g.nx = g.ny = 1;
    const RegionReport r = scan(kPlain, p, 1e-4, g);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].lambda == Complex(5.0, 0.0));
    CHECK(r.samples[0].value.in_G);
    CHECK(*r.samples[0].value.lhs == doctest::Approx(0.0594).epsilon(2e-3));
  }
  SUBCASE("far rectangle is entirely inside G") {
    GridSpec g;
    g.re0 = 300.0;
    g.re1 = 308.0;
    g.im0 = -4.0;
    g.im1 = 4.0;
    g.nx = g.ny = 9;
    const RegionReport r = scan(kPlain, p, 1e-4, g, 2);
    for (const RegionSample& s : r.samples) {
      CHECK(!s.value.excluded);
      CHECK(s.value.in_G);
    }
  }
  SUBCASE("grid crossing a band edge marks the edge sample") {
    GridSpec g;
    g.re0 = 1.0;
    g.re1 = 3.0;
    g.im0 = g.im1 = 0.0;
    g.nx = 3;  // samples exactly at 1, 2, 3
    g.ny = 1;
    const RegionReport r = scan(kPlain, p, 1e-4, g);
    REQUIRE(r.samples.size() == 3);
    CHECK(r.samples[0].value.excluded);   // lambda = s
    CHECK(!r.samples[1].value.excluded);  // interior band point
    CHECK(r.samples[2].value.excluded);   // lambda = d
  }
  SUBCASE("row-major ordering") {
    GridSpec g;
    g.re0 = 4.0;
    g.re1 = 5.0;
    g.im0 = 1.0;
    g.im1 = 2.0;
    g.nx = 2;
    g.ny = 2;
    const RegionReport r = scan(kPlain, p, 0.0, g);
    REQUIRE(r.samples.size() == 4);
    CHECK(r.samples[0].lambda == Complex(4.0, 1.0));
    CHECK(r.samples[1].lambda == Complex(5.0, 1.0));
    CHECK(r.samples[2].lambda == Complex(4.0, 2.0));
    CHECK(r.samples[3].lambda == Complex(5.0, 2.0));
  }
  SUBCASE("scan is thread-count independent") {
    GridSpec g;
    g.re0 = -6.0;
    g.re1 = 6.0;
    g.im0 = -2.0;
    g.im1 = 2.0;
    g.nx = 21;
    g.ny = 7;
    const RegionReport a = scan(kPlain, p, 1e-4, g, 1);
    const RegionReport b = scan(kPlain, p, 1e-4, g, 4);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].lambda == b.samples[i].lambda);
      CHECK(a.samples[i].value.in_G == b.samples[i].value.in_G);
      if (a.samples[i].value.lhs)
        CHECK(*a.samples[i].value.lhs == *b.samples[i].value.lhs);
    }
  }
  SUBCASE("grid validation") {
    GridSpec g;
    g.nx = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.nx = 2;
    g.ny = 1;
    g.re0 = 1.0;
    g.re1 = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
}
