#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "jacobi2p/background.hpp"
#include "jacobi2p/random.hpp"

using namespace jacobi2p;

namespace {

const BorgData kPlain{1.0, 3.0, 0.0, -1};     // a1 = 2, a2 = 1
const BorgData kPlainPole{1.0, 3.0, 0.0, +1}; // a1 = 1, a2 = 2
const BorgData kShifted{1.0, 3.0, 0.5, +1};

double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("reconstruction from spectral data") {
  const Background bg = reconstruct(kPlain);
  CHECK(bg.a1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(bg.a2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bg.b1 == 0.0);
  CHECK(bg.b2 == 0.0);
  CHECK(!std::signbit(bg.b2));  // normal form keeps +0.0

  const Background swapped = reconstruct(kPlainPole);
  CHECK(swapped.a1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(swapped.a2 == doctest::Approx(2.0).epsilon(1e-14));

  // Independent route: the entry formulas must satisfy a1*a2 = (d^2-s^2)/4
  // exactly, and the bisection-checked values for nu = 0.5.
  const Background off = reconstruct(kShifted);
  CHECK(off.a1 == doctest::Approx(1.0460072438826847).epsilon(1e-12));
  CHECK(off.a2 == doctest::Approx(1.9120326476671233).epsilon(1e-12));
  CHECK(off.a1 * off.a2 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(off.b1 == 0.5);
  CHECK(off.b2 == -0.5);
  CHECK(off.a1 < off.a2);  // eps = +1

  // band edges recovered from entries
  CHECK(off.band_s() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(off.band_d() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("reconstruction rejects degenerate data") {
  CHECK_THROWS_AS(reconstruct(BorgData{1.0, 3.0, 1.0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(BorgData{1.0, 3.0, -1.0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(BorgData{3.0, 1.0, 0.0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(BorgData{-1.0, 3.0, 0.0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(BorgData{1.0, 3.0, 0.0, 2}), std::invalid_argument);
}

TEST_CASE("hill discriminant values") {
  CHECK(hill_u(kPlain, Complex(3.0, 0.0)) == Complex(1.0, 0.0));
  CHECK(hill_u(kPlain, Complex(1.0, 0.0)) == Complex(-1.0, 0.0));
  CHECK(hill_u(kPlain, Complex(0.0, 0.0)).real() == doctest::Approx(-1.25).epsilon(1e-15));

  // data route vs entry route
  Rng rng(7);
  const Background bg = reconstruct(kShifted);
  for (int i = 0; i < 200; ++i) {
    const Complex z = rng.in_rect({-9.0, -9.0}, {9.0, 9.0});
    CHECK(rel_err(hill_u(kShifted, z), hill_u(bg, z)) < 1e-12);
  }
}

TEST_CASE("floquet multiplier and map") {
  SUBCASE("real exterior point") {
    const FloquetValue f = floquet(kPlain, Complex(5.0, 0.0));
    CHECK(f.rho.real() == doctest::Approx(5.0 - std::sqrt(24.0)).epsilon(1e-14));
    CHECK(f.rho.imag() == 0.0);
    CHECK(f.w.real() == doctest::Approx(0.3178372451957823).epsilon(1e-12));
    CHECK(f.w.imag() == 0.0);
    CHECK(f.w.real() > 0.0);
    CHECK(f.w.real() < 1.0);
  }
  SUBCASE("negative exterior gets negative w") {
    const FloquetValue f = floquet(kPlain, Complex(-5.0, 0.0));
    CHECK(f.w.real() < 0.0);
    CHECK(f.w.imag() == 0.0);
    CHECK(std::abs(f.w * f.w - f.rho) < 1e-15);
  }
  SUBCASE("gap point, upper-half-plane limit") {
    const FloquetValue f = floquet(kPlain, Complex(0.0, 0.0));
    CHECK(f.rho.real() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(f.rho.imag() == 0.0);
    CHECK(std::abs(f.w) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(f.w.imag() < 0.0);
    CHECK(f.w.real() == 0.0);
  }
  SUBCASE("w -> 0 for large lambda") {
    CHECK(std::abs(floquet_w(kPlain, Complex(1e6, 0.0))) < 1e-5);
  }
  SUBCASE("band points sit on the lower unit semicircle") {
    for (double x : {1.2, 2.0, 2.9}) {
      const Complex w = floquet_w(kPlain, Complex(x, 0.0));
      CHECK(std::abs(std::abs(w) - 1.0) < 1e-14);
      CHECK(w.imag() <= 0.0);
      CHECK(w.real() >= 0.0);  // right band maps to the fourth quadrant
      const Complex wl = floquet_w(kPlain, Complex(-x, 0.0));
      CHECK(std::abs(std::abs(wl) - 1.0) < 1e-14);
      CHECK(wl.imag() <= 0.0);
      CHECK(wl.real() <= 0.0);  // left band maps to the third quadrant
    }
  }
  SUBCASE("band edges give w^4 = 1") {
    for (double e : {1.0, 3.0, -1.0, -3.0}) {
      const Complex w = floquet_w(kPlain, Complex(e, 0.0));
      CHECK(std::abs(pow_i(w, 4) - Complex(1.0, 0.0)) < 1e-14);
    }
  }
  SUBCASE("conjugation symmetry and |rho| <= 1 off the axis") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      Complex z = rng.in_rect({-8.0, -8.0}, {8.0, 8.0});
      if (std::abs(z.imag()) < 1e-12) continue;
      const FloquetValue up = floquet(kShifted, z);
      const FloquetValue dn = floquet(kShifted, std::conj(z));
      CHECK(std::abs(std::conj(up.rho) - dn.rho) < 1e-14 * (1.0 + std::abs(up.rho)));
      CHECK(std::abs(std::conj(up.w) - dn.w) < 1e-14);
      CHECK(std::abs(up.rho) <= 1.0 + 1e-14);
      if (z.imag() > 0.0) CHECK(up.w.imag() < 0.0);
      const Complex u = hill_u(kShifted, z);
      CHECK(std::abs(up.rho * up.rho - 2.0 * u * up.rho + 1.0) < 1e-12 * (1.0 + std::abs(u)));
    }
  }
}

TEST_CASE("fundamental polynomials") {
  const Background bg = reconstruct(kPlain);  // a1=2, a2=1, b=0
  SUBCASE("closed forms at low order") {
    const Complex lam(5.0, 0.0);
    const FundamentalPair fp = fundamental_polys(bg, lam, 4);
    CHECK(fp.s_vals[0] == Complex(0.0, 0.0));
    CHECK(fp.s_vals[1] == Complex(1.0, 0.0));
    CHECK(fp.c_vals[0] == Complex(1.0, 0.0));
    CHECK(fp.c_vals[1] == Complex(0.0, 0.0));
    CHECK(fp.s_vals[2].real() == doctest::Approx(2.5).epsilon(1e-15));   // lambda / 2
    CHECK(fp.c_vals[2].real() == doctest::Approx(-0.5).epsilon(1e-15));  // -a2/a1
    CHECK(fp.s_vals[3].real() == doctest::Approx(10.5).epsilon(1e-14));  // (25-4)/2
  }
  SUBCASE("wronskian pinned to one") {
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
      const Complex z = rng.in_disk(8.0);
      const FundamentalPair fp = fundamental_polys(bg, z, 3);
      const Complex w = fp.s_vals[3] * fp.c_vals[2] - fp.s_vals[2] * fp.c_vals[3];
      CHECK(std::abs(w - 1.0) <
            1e-10 * std::max(1.0, std::abs(fp.s_vals[3] * fp.c_vals[2])));
    }
  }
  SUBCASE("leading coefficient of s_n") {
    // s_n ~ lambda^{n-1} / (a1 ... a_{n-1}) for large lambda
    const Complex lam(1e4, 0.0);
    const FundamentalPair fp = fundamental_polys(bg, lam, 6);
    double denom = 1.0;
    for (int k = 1; k <= 5; ++k) denom *= bg.a(k);
    CHECK(std::abs(fp.s_vals[6]) ==
          doctest::Approx(std::pow(1e4, 5) / denom).epsilon(1e-3));
  }
  CHECK_THROWS_AS(fundamental_polys(bg, Complex(1.0, 0.0), 2), std::invalid_argument);
}

TEST_CASE("weyl functions") {
  const Background bg = reconstruct(kPlain);
  SUBCASE("value at lambda = 5") {
    const BackgroundEval ev = evaluate(kPlain, bg, Complex(5.0, 0.0));
    CHECK(ev.v.real() == doctest::Approx(5.5).epsilon(1e-15));
    const double want = (5.5 - std::sqrt(24.0)) / 2.5;
    CHECK(!ev.m.pole);
    CHECK(ev.m.value.real() == doctest::Approx(want).epsilon(1e-13));
    CHECK(std::abs(ev.m.value.imag()) < 1e-15);
    // regularized products match their closed forms
    CHECK(std::abs(ev.reg_m - (5.0 * ev.m.value)) < 1e-13);
    CHECK(std::abs(ev.reg_mhat_w2 - 5.0 * ev.mhat.value * ev.rho) < 1e-12);
  }
  SUBCASE("product identity m mhat = (lambda+nu)/(lambda-nu)") {
    Rng rng(17);
    const Background sb = reconstruct(kShifted);
    for (int i = 0; i < 300; ++i) {
      Complex z = rng.in_rect({-8.0, -8.0}, {8.0, 8.0});
      if (std::abs(z - Complex(0.5, 0.0)) < 1e-3) continue;
      if (kShifted.dist_band_edges(z) < 1e-6) continue;
      const BackgroundEval ev = evaluate(kShifted, sb, z);
      const Complex want = (z + 0.5) / (z - 0.5);
      CHECK(rel_err(ev.m.value * ev.mhat.value, want) < 1e-10);
    }
  }
  SUBCASE("pole markers sit on the right branch") {
    const BackgroundEval plain = evaluate(kPlain, bg, Complex(0.0, 0.0));
    CHECK(!plain.m.pole);      // eps = -1: m finite at nu
    CHECK(plain.mhat.pole);    // ... and mhat has the pole
    const Background bp = reconstruct(kPlainPole);
    const BackgroundEval pole = evaluate(kPlainPole, bp, Complex(0.0, 0.0));
    CHECK(pole.m.pole);
    CHECK(pole.chi1.pole);
    CHECK(!pole.mhat.pole);
  }
  SUBCASE("classical quotient route agrees") {
    Rng rng(23);
    const Background sb = reconstruct(kShifted);
    for (int i = 0; i < 200; ++i) {
      Complex z = rng.in_rect({-8.0, -8.0}, {8.0, 8.0});
      if (std::abs(z - Complex(0.5, 0.0)) < 1e-2) continue;
      if (kShifted.dist_band_edges(z) < 1e-3) continue;
      const BackgroundEval ev = evaluate(kShifted, sb, z);
      const FundamentalPair fp = fundamental_polys(sb, z, 3);
      const Complex v_poly = 0.5 * (fp.s_vals[3] - fp.c_vals[2]);
      const Complex m_quot = (v_poly - ev.sqrt_u2m1) / fp.s_vals[2];
      CHECK(rel_err(m_quot, ev.m.value) < 1e-10);
      const Complex mhat_quot = (v_poly + ev.sqrt_u2m1) / fp.s_vals[2];
      CHECK(rel_err(mhat_quot, ev.mhat.value) < 1e-10);
    }
  }
}

TEST_CASE("weyl solutions") {
  const Background bg = reconstruct(kPlain);
  const BackgroundEval ev = evaluate(kPlain, bg, Complex(5.0, 0.0));
  CHECK(weyl_solution(ev, 0).value == Complex(1.0, 0.0));
  CHECK(std::abs(weyl_solution(ev, 1).value - ev.m.value) == 0.0);
  CHECK(std::abs(weyl_solution(ev, 2).value - ev.rho) < 1e-15);

  SUBCASE("psi_1 through the floquet closed form") {
    // 4 a1 (lambda + nu) w^2 / ((d^2-s^2)(w^2 - w^{2 eps}(nu)))
    const Complex w2 = ev.w * ev.w;
    const Complex w2nu = floquet_w(kPlain, Complex(0.0, 0.0));
    const Complex w2eps = 1.0 / (w2nu * w2nu);  // eps = -1
    CHECK(std::abs(w2eps - Complex(-2.0, 0.0)) < 1e-14);
    const Complex psi1 = 4.0 * bg.a1 * 5.0 * w2 / (8.0 * (w2 - w2eps));
    CHECK(rel_err(psi1, ev.m.value) < 1e-12);
  }
  SUBCASE("floquet shift by one period") {
    Rng rng(29);
    const Background sb = reconstruct(kShifted);
    for (int i = 0; i < 100; ++i) {
      Complex z = rng.in_rect({-7.0, -7.0}, {7.0, 7.0});
      if (kShifted.dist_band_edges(z) < 1e-3) continue;
      if (std::abs(z - Complex(0.5, 0.0)) < 1e-3) continue;
      const BackgroundEval e2 = evaluate(kShifted, sb, z);
      for (int n = 0; n <= 5; ++n) {
        const Complex lhs = weyl_solution(e2, n + 2).value;
        const Complex rhs = e2.rho * weyl_solution(e2, n).value;
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
        const Complex lh = weyl_solution_hat(e2, n + 2).value;
        const Complex rh = weyl_solution_hat(e2, n).value / e2.rho;
        CHECK(std::abs(lh - rh) < 1e-12 * std::max(1.0, std::abs(rh)));
      }
    }
  }
  SUBCASE("pole propagates to odd entries only") {
    const Background bp = reconstruct(kPlainPole);
    const BackgroundEval ep = evaluate(kPlainPole, bp, Complex(0.0, 0.0));
    CHECK(!weyl_solution(ep, 0).pole);
    CHECK(weyl_solution(ep, 1).pole);
    CHECK(!weyl_solution(ep, 2).pole);
    CHECK(weyl_solution(ep, 3).pole);
    CHECK(!weyl_solution_hat(ep, 1).pole);
  }
}

TEST_CASE("green function") {
  const Background bg = reconstruct(kPlain);
  SUBCASE("vanishes for m <= n") {
    CHECK(green(kPlain, bg, Complex(5.0, 0.0), 3, 3) == Complex(0.0, 0.0));
    CHECK(green(kPlain, bg, Complex(5.0, 0.0), 3, 1) == Complex(0.0, 0.0));
  }
  SUBCASE("first superdiagonal is 1/a_n") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
      Complex z = rng.in_rect({-7.0, -7.0}, {7.0, 7.0});
      if (kPlain.dist_band_edges(z) < 1e-2) continue;
      const BackgroundEval ev = evaluate(kPlain, bg, z);
      for (int n = 0; n <= 6; ++n) {
        const Complex g = green(ev, bg, n, n + 1);
        CHECK(rel_err(g, Complex(1.0 / bg.a(n), 0.0)) < 1e-11);
      }
    }
  }
  SUBCASE("delta recurrence, including at nu") {
    const Background sb = reconstruct(kShifted);
    Rng rng(37);
    std::vector<Complex> points;
    for (int i = 0; i < 60; ++i) points.push_back(rng.in_rect({-7.0, -7.0}, {7.0, 7.0}));
    points.push_back(Complex(0.5, 0.0));  // exactly at nu: regularized forms stay finite
    for (const Complex& z : points) {
      if (kShifted.dist_band_edges(z) < 1e-2) continue;
      const BackgroundEval ev = evaluate(kShifted, sb, z);
      for (int n = 1; n <= 7; ++n)
        for (int m = 0; m <= 8; ++m) {
          const Complex g0 = green(ev, sb, n - 1, m);
          const Complex g1 = green(ev, sb, n, m);
          const Complex g2 = green(ev, sb, n + 1, m);
          const Complex res = sb.a(n - 1) * g0 + (sb.b(n) - z) * g1 + sb.a(n) * g2 -
                              (n == m ? 1.0 : 0.0);
          const double scale = (1.0 + std::abs(z)) *
                               std::max({1.0, std::abs(g0), std::abs(g1), std::abs(g2)});
          CHECK(std::abs(res) < 1e-10 * scale);
        }
    }
  }
  SUBCASE("example value at n=0, m=2") {
    // G(0,2) = D lambda at nu = 0
    const Complex g =
        green(kPlain, bg, Complex(5.0, 0.0), 0, 2);
    CHECK(g.real() == doctest::Approx(2.5).epsilon(1e-13));
  }
}
