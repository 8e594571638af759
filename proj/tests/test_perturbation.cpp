#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "jacobi2p/perturbation.hpp"
#include "jacobi2p/random.hpp"
#include "jacobi2p/regions.hpp"
#include "jacobi2p/verify.hpp"

using namespace jacobi2p;

namespace {

const BorgData kPlain{1.0, 3.0, 0.0, -1};

Perturbation single_b_site(const Background& bg, int site, Complex dev) {
  Perturbation p;
  p.support = site;
  for (int k = 1; k <= site; ++k) {
    p.a.emplace_back(bg.a(k), 0.0);
    p.c.emplace_back(bg.a(k), 0.0);
    p.b.emplace_back(bg.b(k), 0.0);
  }
  p.b[static_cast<std::size_t>(site - 1)] += dev;
  return p;
}

}  // namespace

TEST_CASE("moments") {
  const Background bg = reconstruct(kPlain);
  SUBCASE("single imaginary b-shift at site 1") {
    const Perturbation p = single_b_site(bg, 1, Complex(0.0, 0.1));
    const MomentSummary ms = moments(p, bg);
    REQUIRE(ms.d_seq.size() == 2);
    CHECK(ms.d_seq[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ms.d_seq[1] == 0.0);
    CHECK(ms.total0 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ms.total1 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ms.kappa0(0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ms.kappa0(1) == 0.0);
    CHECK(ms.kappa1(0) == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("zero perturbation") {
    const MomentSummary ms = moments(Perturbation::none(), bg);
    CHECK(ms.total0 == 0.0);
    CHECK(ms.total1 == 0.0);
    REQUIRE(ms.d_seq.size() == 1);
    CHECK(ms.d_seq[0] == 0.0);
  }
  SUBCASE("a and c compensate through the product") {
    Perturbation p;
    p.support = 1;
    p.a = {Complex(2.0 * bg.a1, 0.0)};
    p.c = {Complex(0.5 * bg.a1, 0.0)};
    p.b = {Complex(bg.b1, 0.0)};
    const MomentSummary ms = moments(p, bg);
    CHECK(ms.d_seq[0] == 0.0);
    CHECK(ms.d_seq[1] == 0.0);  // a1 c1 / a1^0 == a1^0 exactly
    CHECK(ms.total0 == 0.0);
  }
  SUBCASE("kappa monotone, zero beyond support") {
    Rng rng(5);
    const Perturbation p = random_perturbation(rng, bg, 7, 0.5);
    const MomentSummary ms = moments(p, bg);
    for (int n = 0; n <= p.support + 1; ++n) {
      CHECK(ms.kappa0(n) >= ms.kappa0(n + 1));
      CHECK(ms.kappa1(n) >= ms.kappa1(n + 1));
    }
    CHECK(ms.kappa0(p.support + 1) == 0.0);
    CHECK(ms.kappa1(p.support + 1) == 0.0);
  }
  SUBCASE("scaling is exactly linear") {
    Rng rng(9);
    const Perturbation p = random_perturbation(rng, bg, 6, 0.4);
    const MomentSummary before = moments(p, bg);
    const Perturbation half = scale_perturbation(p, bg, 0.5);
    const MomentSummary after = moments(half, bg);
    CHECK(after.total0 == doctest::Approx(0.5 * before.total0).epsilon(1e-14));
    CHECK(after.total1 == doctest::Approx(0.5 * before.total1).epsilon(1e-14));
  }
}

TEST_CASE("perturbation validation") {
  Perturbation p;
  p.support = 1;
  p.a = {Complex(0.0, 0.0)};
  p.b = {Complex(0.0, 0.0)};
  p.c = {Complex(1.0, 0.0)};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.a = {Complex(1.0, 0.0)};
  CHECK_NOTHROW(p.validate());
  p.b.clear();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("kernel structure") {
  const Background bg = reconstruct(kPlain);
  const Complex lam(5.0, 0.0);
  SUBCASE("upper triangular with finite support") {
    const Perturbation p = single_b_site(bg, 2, Complex(0.3, -0.2));
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= n; ++m)
        CHECK(kernel_A(p, kPlain, bg, lam, n, m) == Complex(0.0, 0.0));
    CHECK(kernel_A(p, kPlain, bg, lam, 0, p.support + 2) == Complex(0.0, 0.0));
  }
  SUBCASE("first superdiagonal value") {
    // A(n-1, n) = (b0_n - b_n) / a0_{n-1}
    for (int site : {1, 2, 3}) {
      const Complex dev(0.4, 0.7);
      const Perturbation p = single_b_site(bg, site, dev);
      const Complex got = kernel_A(p, kPlain, bg, lam, site - 1, site);
      const Complex want = -dev / bg.a(site - 1);
      CHECK(std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
  SUBCASE("zero perturbation kills the kernel") {
    for (int n = 0; n <= 3; ++n)
      for (int m = n + 1; m <= 5; ++m)
        CHECK(kernel_A(Perturbation::none(), kPlain, bg, lam, n, m) == Complex(0.0, 0.0));
  }
  SUBCASE("tilde kernel is A scaled by w^{m-n}") {
    Rng rng(13);
    const Perturbation p = random_perturbation(rng, bg, 5, 0.4);
    for (int i = 0; i < 40; ++i) {
      Complex z = rng.in_rect({-7.0, -7.0}, {7.0, 7.0});
      if (kPlain.dist_band_edges(z) < 1e-2) continue;
      const Complex w = floquet_w(kPlain, z);
      for (int n = 0; n <= p.support; ++n)
        for (int m = n + 1; m <= p.support + 1; ++m) {
          const Complex a = kernel_A(p, kPlain, bg, z, n, m);
          const Complex at = kernel_A_tilde(p, kPlain, bg, z, n, m);
          CHECK(std::abs(at - a * pow_i(w, m - n)) <
                1e-10 * std::max(1.0, std::abs(at)));
        }
    }
  }
}

TEST_CASE("kernel bounds on a sample grid") {
  Rng rng(21);
  InvariantCheck c1 = checks::kernel_bound(rng, 400);
  CHECK_MESSAGE(c1.passed, c1.detail);
  InvariantCheck c2 = checks::kernel_first_moment_bound(rng, 400);
  CHECK_MESSAGE(c2.passed, c2.detail);
}
