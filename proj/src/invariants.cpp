#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "jacobi2p/parallel.hpp"
#include "jacobi2p/random.hpp"
#include "jacobi2p/serialize.hpp"
#include "jacobi2p/verify.hpp"

namespace jacobi2p {
namespace {

struct Case {
  BorgData borg;
  Background bg;
};

// Four fixed backgrounds spanning both pole indicators, plus random draws.
std::vector<Case> background_pool(Rng& rng, int extra) {
  std::vector<BorgData> borgs = {
      {1.0, 3.0, 0.0, -1}, {1.0, 3.0, 0.0, +1}, {1.0, 3.0, 0.5, -1}, {1.0, 3.0, 0.5, +1}};
  for (int i = 0; i < extra; ++i) borgs.push_back(random_borg(rng));
  std::vector<Case> out;
  out.reserve(borgs.size());
  for (const BorgData& b : borgs) out.push_back({b, reconstruct(b)});
  return out;
}

// Random lambda with |Re|,|Im| <= 2d, keeping 1e-3 clear of the band edges
// and of the Weyl pole.
Complex sample_lambda(Rng& rng, const BorgData& borg) {
  while (true) {
    const Complex z = rng.in_rect({-2.0 * borg.d, -2.0 * borg.d}, {2.0 * borg.d, 2.0 * borg.d});
    if (borg.dist_band_edges(z) < 1e-3) continue;
    if (borg.weyl_pole_at_nu() && std::abs(z - Complex(borg.nu, 0.0)) < 1e-3) continue;
    return z;
  }
}

std::string describe(Complex lambda, double got, double bound) {
  return "lambda=" + format_complex(lambda) + " got=" + format_double(got) +
         " bound=" + format_double(bound);
}

InvariantCheck pass(const std::string& id) { return {id, true, ""}; }

InvariantCheck fail(const std::string& id, const std::string& detail) {
  return {id, false, detail};
}

}  // namespace

namespace checks {

InvariantCheck hill_roundtrip(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Complex lambda = rng.in_rect({-3.0 * c.borg.d, -3.0 * c.borg.d},
                                       {3.0 * c.borg.d, 3.0 * c.borg.d});
    const Complex ua = hill_u(c.borg, lambda);
    const Complex ub = hill_u(c.bg, lambda);
    if (std::abs(ua - ub) > 1e-12 * (1.0 + std::abs(ua)))
      return fail("background.hill_roundtrip", describe(lambda, std::abs(ua - ub), 0.0));
  }
  return pass("background.hill_roundtrip");
}

InvariantCheck band_edge_roots(Rng& rng, int n_cases) {
  for (int i = 0; i < n_cases; ++i) {
    const BorgData borg = random_borg(rng);
    const Background bg = reconstruct(borg);
    const double s_rec = bg.band_s();
    const double d_rec = bg.band_d();
    const double tol = 1e-10 * std::max(1.0, borg.d);
    if (std::abs(s_rec - borg.s) > tol || std::abs(d_rec - borg.d) > tol)
      return fail("background.band_edge_roots",
                  "s_rec=" + format_double(s_rec) + " d_rec=" + format_double(d_rec));
    for (double edge : {s_rec, d_rec, -s_rec, -d_rec}) {
      const Complex u = hill_u(bg, Complex(edge, 0.0));
      if (std::abs(std::abs(u.real()) - 1.0) > 1e-10 || std::abs(u.imag()) > 1e-10)
        return fail("background.band_edge_roots",
                    "u(edge) != +-1 at edge=" + format_double(edge));
    }
  }
  return pass("background.band_edge_roots");
}

InvariantCheck reconstruction_bounds(Rng& rng, int n_cases) {
  for (int i = 0; i < n_cases; ++i) {
    const BorgData borg = random_borg(rng);
    const Background bg = reconstruct(borg);
    const double lo = (borg.d - borg.s) / 2.0, hi = (borg.d + borg.s) / 2.0;
    for (double a : {bg.a1, bg.a2})
      if (!(a >= lo && a <= hi))
        return fail("background.reconstruction_bounds",
                    "a=" + format_double(a) + " outside [" + format_double(lo) + ", " +
                        format_double(hi) + "]");
    const double prod = bg.a1 * bg.a2;
    const double target = (borg.d * borg.d - borg.s * borg.s) / 4.0;
    if (std::abs(prod - target) > 1e-12 * target)
      return fail("background.reconstruction_bounds", "a1*a2 off: " + format_double(prod));
    const bool order_ok = (borg.eps == +1) ? (bg.a1 < bg.a2) : (bg.a1 > bg.a2);
    if (!order_ok) return fail("background.reconstruction_bounds", "eps/order mismatch");
  }
  return pass("background.reconstruction_bounds");
}

InvariantCheck floquet_identities(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const double quad =
        std::abs(ev.rho * ev.rho - 2.0 * ev.u * ev.rho + 1.0) /
        std::max(1.0, std::abs(2.0 * ev.u * ev.rho));
    if (quad > 1e-12) return fail("background.floquet_quadratic", describe(lambda, quad, 1e-12));
    if (std::abs(ev.rho) > 1.0 + 1e-12)
      return fail("background.floquet_quadratic",
                  describe(lambda, std::abs(ev.rho), 1.0));
    if (std::abs(ev.w * ev.w - ev.rho) > 1e-12 * std::max(1.0, std::abs(ev.rho)))
      return fail("background.floquet_quadratic", "w^2 != rho at " + format_complex(lambda));
    const Complex w2 = ev.w * ev.w;
    const Complex u_from_w = 0.5 * (w2 + 1.0 / w2);
    if (std::abs(u_from_w - ev.u) > 1e-12 * (1.0 + std::abs(ev.u)))
      return fail("background.floquet_quadratic",
                  "u != (w^2 + w^-2)/2 at " + format_complex(lambda));
  }
  return pass("background.floquet_quadratic");
}

InvariantCheck floquet_modulus(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    // on-spectrum point (limit from above)
    const double band_lo = rng.flip() ? c.borg.s : -c.borg.d;
    const double x = band_lo + rng.unit() * (c.borg.d - c.borg.s);
    const Complex w_on = floquet_w(c.borg, Complex(x, 0.0));
    if (std::abs(std::abs(w_on) - 1.0) > 1e-12)
      return fail("background.floquet_modulus", describe(Complex(x, 0.0), std::abs(w_on), 1.0));
    // off-spectrum point
    Complex z = sample_lambda(rng, c.borg);
    while (c.borg.dist_continuous_spectrum(z) < 1e-3) z = sample_lambda(rng, c.borg);
    const Complex w_off = floquet_w(c.borg, z);
    if (!(std::abs(w_off) < 1.0))
      return fail("background.floquet_modulus", describe(z, std::abs(w_off), 1.0));
  }
  return pass("background.floquet_modulus");
}

InvariantCheck wronskian(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Complex lambda = sample_lambda(rng, c.borg);
    const FundamentalPair fp = fundamental_polys(c.bg, lambda, 3);
    const Complex lhs = fp.s_vals[3] * fp.c_vals[2] - fp.s_vals[2] * fp.c_vals[3];
    const double scale =
        std::max(1.0, std::abs(fp.s_vals[3] * fp.c_vals[2]) + std::abs(fp.s_vals[2] * fp.c_vals[3]));
    if (std::abs(lhs - 1.0) > 1e-10 * scale)
      return fail("background.wronskian", describe(lambda, std::abs(lhs - 1.0), 1e-10 * scale));
  }
  return pass("background.wronskian");
}

InvariantCheck weyl_product(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Complex lambda = sample_lambda(rng, c.borg);
    while (std::abs(lambda - Complex(c.borg.nu, 0.0)) < 1e-3) lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const Complex prod = ev.m.value * ev.mhat.value;
    const Complex target = (lambda + c.borg.nu) / (lambda - c.borg.nu);
    if (std::abs(prod - target) > 1e-10 * std::max(1.0, std::abs(target)))
      return fail("background.weyl_product",
                  describe(lambda, std::abs(prod - target), 1e-10));
  }
  return pass("background.weyl_product");
}

InvariantCheck weyl_closed_form(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Complex lambda = sample_lambda(rng, c.borg);
    while (std::abs(lambda - Complex(c.borg.nu, 0.0)) < 1e-3) lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const FundamentalPair fp = fundamental_polys(c.bg, lambda, 3);
    // classical Weyl quotient from the recurrence polynomials
    const Complex v_poly = 0.5 * (fp.s_vals[3] - fp.c_vals[2]);
    const Complex m_poly = (v_poly - ev.sqrt_u2m1) / fp.s_vals[2];
    if (std::abs(m_poly - ev.m.value) > 1e-10 * std::max(1.0, std::abs(ev.m.value)))
      return fail("background.weyl_closed_form",
                  describe(lambda, std::abs(m_poly - ev.m.value), 1e-10));
    // Floquet structure against the polynomial representation
    const Complex psi2 = fp.c_vals[2] + ev.m.value * fp.s_vals[2];
    const Complex psi3 = fp.c_vals[3] + ev.m.value * fp.s_vals[3];
    if (std::abs(psi2 - ev.rho) > 1e-10 * std::max(1.0, std::abs(ev.rho)))
      return fail("background.weyl_closed_form", "psi2 != rho at " + format_complex(lambda));
    if (std::abs(psi3 - ev.rho * ev.m.value) >
        1e-10 * std::max(1.0, std::abs(ev.rho * ev.m.value)))
      return fail("background.weyl_closed_form", "psi3 != rho m at " + format_complex(lambda));
  }
  return pass("background.weyl_closed_form");
}

InvariantCheck conjugate_symmetry(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Complex lambda = sample_lambda(rng, c.borg);
    while (std::abs(lambda.imag()) < 1e-6) lambda = sample_lambda(rng, c.borg);
    const BackgroundEval up = evaluate(c.borg, c.bg, lambda);
    const BackgroundEval dn = evaluate(c.borg, c.bg, std::conj(lambda));
    for (int n = 0; n <= 6; ++n) {
      const Complex a = weyl_solution(up, n).value;
      const Complex b = weyl_solution(dn, n).value;
      if (std::abs(std::conj(a) - b) > 1e-10 * std::max(1.0, std::abs(a)))
        return fail("background.conjugate_symmetry",
                    "psi_" + std::to_string(n) + " at " + format_complex(lambda));
      const Complex ah = weyl_solution_hat(up, n).value;
      const Complex bh = weyl_solution_hat(dn, n).value;
      if (std::abs(std::conj(ah) - bh) > 1e-10 * std::max(1.0, std::abs(ah)))
        return fail("background.conjugate_symmetry",
                    "psihat_" + std::to_string(n) + " at " + format_complex(lambda));
    }
  }
  return pass("background.conjugate_symmetry");
}

InvariantCheck psi_recurrence(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    std::vector<Complex> psi(10), psih(10);
    for (int n = 0; n < 10; ++n) {
      psi[static_cast<std::size_t>(n)] = weyl_solution(ev, n).value;
      psih[static_cast<std::size_t>(n)] = weyl_solution_hat(ev, n).value;
    }
    for (int n = 1; n < 9; ++n) {
      for (const auto* seq : {&psi, &psih}) {
        const Complex res = c.bg.a(n - 1) * (*seq)[static_cast<std::size_t>(n - 1)] +
                            c.bg.b(n) * (*seq)[static_cast<std::size_t>(n)] +
                            c.bg.a(n) * (*seq)[static_cast<std::size_t>(n + 1)] -
                            lambda * (*seq)[static_cast<std::size_t>(n)];
        const double scale = std::max({1.0, std::abs((*seq)[static_cast<std::size_t>(n - 1)]),
                                       std::abs((*seq)[static_cast<std::size_t>(n)]),
                                       std::abs((*seq)[static_cast<std::size_t>(n + 1)])});
        if (std::abs(res) > 1e-10 * scale * (1.0 + std::abs(lambda)))
          return fail("background.psi_recurrence",
                      describe(lambda, std::abs(res), 1e-10 * scale));
      }
    }
  }
  return pass("background.psi_recurrence");
}

InvariantCheck green_delta(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const int m = rng.index(9);
    for (int n = 1; n <= 8; ++n) {
      const Complex g0 = green(ev, c.bg, n - 1, m);
      const Complex g1 = green(ev, c.bg, n, m);
      const Complex g2 = green(ev, c.bg, n + 1, m);
      const Complex res = c.bg.a(n - 1) * g0 + (c.bg.b(n) - lambda) * g1 + c.bg.a(n) * g2 -
                          (n == m ? 1.0 : 0.0);
      const double scale =
          (1.0 + std::abs(lambda)) *
          std::max({1.0, std::abs(g0), std::abs(g1), std::abs(g2)});
      if (std::abs(res) > 1e-10 * scale)
        return fail("background.green_delta",
                    "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " +
                        describe(lambda, std::abs(res), 1e-10 * scale));
    }
  }
  return pass("background.green_delta");
}

InvariantCheck chi1_bound(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const double s = c.borg.s, d = c.borg.d;
    const double bound =
        4.0 * std::sqrt(2.0) * d * d / ((d - s) * std::sqrt(d * d - s * s));
    const double got =
        std::abs(ev.chi1.value) * std::abs(ev.w * ev.w - params.w2eps_nu);
    if (got > bound * (1.0 + 1e-9))
      return fail("background.chi1_bound", describe(lambda, got, bound));
  }
  return pass("background.chi1_bound");
}

InvariantCheck green_tilde_bound(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const Complex w2 = ev.w * ev.w;
    const double factor = std::abs(1.0 - w2 * w2) / std::abs(ev.w);
    for (int n = 0; n <= 8; ++n)
      for (int m = n + 1; m <= 8; ++m) {
        const double got = std::abs(green_tilde(ev, c.bg, n, m)) * factor;
        if (got > params.K1 * (1.0 + 1e-9))
          return fail("background.green_tilde_bound",
                      "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " +
                          describe(lambda, got, params.K1));
      }
  }
  return pass("background.green_tilde_bound");
}

InvariantCheck kernel_bound(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    const Perturbation pert = random_perturbation(rng, c.bg, 6, 0.3);
    const MomentSummary ms = moments(pert, c.bg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const Complex w2 = ev.w * ev.w;
    const double k_factor = params.K1 * std::abs(ev.w) / std::abs(1.0 - w2 * w2);
    for (int n = 0; n <= pert.support; ++n)
      for (int m = n + 1; m <= pert.support + 1; ++m) {
        const double got = std::abs(kernel_A_tilde(pert, ev, c.bg, n, m));
        const double bound = k_factor * ms.d_seq[static_cast<std::size_t>(m - 1)];
        if (got > bound * (1.0 + 1e-9) + 1e-300)
          return fail("perturbation.kernel_bound",
                      "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " +
                          describe(lambda, got, bound));
      }
  }
  return pass("perturbation.kernel_bound");
}

InvariantCheck kernel_first_moment_bound(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 6);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    const Perturbation pert = random_perturbation(rng, c.bg, 6, 0.3);
    const MomentSummary ms = moments(pert, c.bg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    for (int n = 0; n <= pert.support; ++n)
      for (int m = n + 1; m <= pert.support + 1; ++m) {
        const double got = std::abs(kernel_A_tilde(pert, ev, c.bg, n, m));
        const double bound = params.K1 * (m - n) *
                             ms.d_seq[static_cast<std::size_t>(m - 1)] * std::abs(ev.w);
        if (got > bound * (1.0 + 1e-9) + 1e-300)
          return fail("perturbation.kernel_first_moment_bound",
                      "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " +
                          describe(lambda, got, bound));
      }
  }
  return pass("perturbation.kernel_first_moment_bound");
}

InvariantCheck moments_product_only(Rng& rng, int n_cases) {
  const auto pool = background_pool(rng, 2);
  for (int i = 0; i < n_cases; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Perturbation pert = random_perturbation(rng, c.bg, 6, 0.4);
    const MomentSummary before = moments(pert, c.bg);
    // twist a and untwist c; every d_m must be unchanged
    const Complex twist = std::polar(rng.uniform(0.3, 2.5), rng.uniform(0.0, 2.0 * M_PI));
    for (auto& x : pert.a) x *= twist;
    for (auto& x : pert.c) x /= twist;
    const MomentSummary after = moments(pert, c.bg);
    for (std::size_t k = 0; k < before.d_seq.size(); ++k)
      if (std::abs(before.d_seq[k] - after.d_seq[k]) > 1e-12 * (1.0 + before.d_seq[k]))
        return fail("perturbation.moments_product_only",
                    "d_" + std::to_string(k + 1) + " changed under a/c twist");
  }
  return pass("perturbation.moments_product_only");
}

InvariantCheck solver_agreement(Rng& rng, int n_pairs) {
  const auto pool = background_pool(rng, 4);
  for (int i = 0; i < n_pairs; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Perturbation pert = random_perturbation(rng, c.bg, 8, 0.4);
    const Complex lambda = sample_lambda(rng, c.borg);
    // keep the pair inside the contraction regime of the series bound
    const RegionParams params = constants(c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const Complex w2 = ev.w * ev.w;
    const double k_lambda = params.K2 * std::abs(ev.w) / std::abs(w2 - params.w2eps_nu);
    const double x = k_lambda * moments(pert, c.bg).kappa0(0) / std::abs(1.0 - w2 * w2);
    if (x > 0.5) pert = scale_perturbation(pert, c.bg, 0.5 / x);
    const JostSolution a = solve_backsub(pert, c.borg, c.bg, lambda);
    const JostSolution b = solve_series(pert, c.borg, c.bg, lambda);
    for (std::size_t n = 0; n < a.v.size(); ++n) {
      const double tol = 1e-9 * std::max(1.0, std::abs(a.v[n]));
      if (std::abs(a.v[n] - b.v[n]) > tol || std::abs(a.V[n] - b.V[n]) > tol)
        return fail("jost.solver_agreement",
                    "n=" + std::to_string(n) + " " +
                        describe(lambda, std::abs(a.v[n] - b.v[n]), tol));
    }
    if (!b.converged)
      return fail("jost.solver_agreement", "series failed to converge at " + format_complex(lambda));
  }
  return pass("jost.solver_agreement");
}

InvariantCheck integral_equation(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 4);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Perturbation pert = random_perturbation(rng, c.bg, 6, 0.3);
    const Complex lambda = sample_lambda(rng, c.borg);
    const JostSolution sol = solve_backsub(pert, c.borg, c.bg, lambda);
    if (sol.recurrence_residual > 1e-9)
      return fail("jost.integral_equation",
                  "recurrence residual " + format_double(sol.recurrence_residual));
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    for (int n = 0; n <= pert.support; ++n) {
      Complex rhs = weyl_solution(ev, n).value;
      for (int m = n + 1; m <= pert.support + 1; ++m)
        rhs += kernel_A(pert, ev, c.bg, n, m) * sol.v[static_cast<std::size_t>(m)];
      double scale = std::max(1.0, std::abs(sol.v[static_cast<std::size_t>(n)]));
      for (int m = n + 1; m <= pert.support + 1; ++m)
        scale = std::max(scale, std::abs(kernel_A(pert, ev, c.bg, n, m) *
                                         sol.v[static_cast<std::size_t>(m)]));
      if (std::abs(rhs - sol.v[static_cast<std::size_t>(n)]) > 1e-9 * scale)
        return fail("jost.integral_equation",
                    "n=" + std::to_string(n) + " " +
                        describe(lambda, std::abs(rhs - sol.v[static_cast<std::size_t>(n)]),
                                 1e-9 * scale));
    }
  }
  return pass("jost.integral_equation");
}

InvariantCheck solution_bound(Rng& rng, int n_lambda) {
  const auto pool = background_pool(rng, 4);
  for (int i = 0; i < n_lambda; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    Perturbation pert = random_perturbation(rng, c.bg, 8, 0.4);
    const MomentSummary raw = moments(pert, c.bg);
    if (raw.total0 > 0.0) pert = scale_perturbation(pert, c.bg, 1e-4 / raw.total0);
    const MomentSummary ms = moments(pert, c.bg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const BackgroundEval ev = evaluate(c.borg, c.bg, lambda);
    const JostSolution sol = solve_backsub(pert, c.borg, c.bg, lambda);
    const Complex w2 = ev.w * ev.w;
    const double k_lambda = params.K2 * std::abs(ev.w) / std::abs(w2 - params.w2eps_nu);
    const double edge = std::abs(1.0 - w2 * w2);
    double wn = 1.0;
    for (int n = 0; n <= pert.support; ++n) {
      const double x = k_lambda * ms.kappa0(n) / edge;
      const double rhs = x * wn * std::exp(x);
      const Complex psi = weyl_solution(ev, n).value;
      const double got = std::abs(sol.v[static_cast<std::size_t>(n)] - psi);
      if (got > rhs * (1.0 + 1e-9) + 1e-300)
        return fail("jost.solution_bound",
                    "n=" + std::to_string(n) + " " + describe(lambda, got, rhs));
      wn *= std::abs(ev.w);
    }
  }
  return pass("jost.solution_bound");
}

InvariantCheck jost_far_field(Rng& rng, int n_cases) {
  const auto pool = background_pool(rng, 0);  // fixed backgrounds only
  for (int i = 0; i < n_cases; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    Perturbation pert = random_perturbation(rng, c.bg, 10, 0.4);
    const MomentSummary raw = moments(pert, c.bg);
    if (raw.total0 > 0.0) pert = scale_perturbation(pert, c.bg, 1e-4 / raw.total0);
    const Complex far(100.0 * c.borg.d, 0.0);
    const Complex v0 = jost_value(pert, c.borg, c.bg, far);
    if (std::abs(v0 - 1.0) >= 1e-6)
      return fail("jost.far_field", describe(far, std::abs(v0 - 1.0), 1e-6));
  }
  return pass("jost.far_field");
}

InvariantCheck jost_contour_mean(Rng& rng, int n_cases) {
  const auto pool = background_pool(rng, 2);
  for (int i = 0; i < n_cases; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const Perturbation pert = random_perturbation(rng, c.bg, 6, 0.3);
    Complex center = sample_lambda(rng, c.borg);
    while (c.borg.dist_continuous_spectrum(center) < 0.2 ||
           (c.borg.weyl_pole_at_nu() &&
            std::abs(center - Complex(c.borg.nu, 0.0)) < 0.2))
      center = sample_lambda(rng, c.borg);
    const double radius = 0.05;
    const int n_pts = 64;
    Complex mean{0.0, 0.0};
    for (int k = 0; k < n_pts; ++k) {
      const double ang = 2.0 * M_PI * k / n_pts;
      mean += jost_value(pert, c.borg, c.bg,
                         center + radius * Complex(std::cos(ang), std::sin(ang)));
    }
    mean /= static_cast<double>(n_pts);
    const Complex at_center = jost_value(pert, c.borg, c.bg, center);
    if (std::abs(mean - at_center) > 1e-8 * (1.0 + std::abs(at_center)))
      return fail("jost.contour_mean",
                  describe(center, std::abs(mean - at_center), 1e-8));
  }
  return pass("jost.contour_mean");
}

InvariantCheck omega_root(Rng&, int) {
  const double t = omega_constant();
  const double resid = std::abs(t * std::exp(t) - 1.0);
  if (resid > 1e-14) return fail("regions.omega_root", "residual " + format_double(resid));
  // bisection oracle on [0.5, 0.6]
  double lo = 0.5, hi = 0.6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) - 1.0 > 0.0) hi = mid; else lo = mid;
  }
  if (std::abs(t - 0.5 * (lo + hi)) > 2e-15)
    return fail("regions.omega_root", "disagrees with bisection oracle");
  return pass("regions.omega_root");
}

InvariantCheck k2_dual_formula(Rng& rng, int n_cases) {
  for (int i = 0; i < n_cases; ++i) {
    const double s = rng.uniform(1e-3, 99.0);
    const double d = s + rng.uniform(1e-3, 100.0 - s);
    BorgData borg{s, d, 0.0, -1};
    const RegionParams p = constants(borg);
    const double closed = k2_closed_form(s, d);
    if (std::abs(p.K2 - closed) > 1e-12 * closed)
      return fail("regions.k2_dual_formula",
                  "s=" + format_double(s) + " d=" + format_double(d) +
                      " rel=" + format_double(std::abs(p.K2 - closed) / closed));
  }
  return pass("regions.k2_dual_formula");
}

InvariantCheck tau_bound(Rng& rng, int n_cases) {
  for (int i = 0; i < n_cases; ++i) {
    const BorgData borg = random_borg(rng);
    const RegionParams p = constants(borg);
    if (!(std::abs(p.tau_nu_eps) <= std::abs(p.tau) * (1.0 + 1e-12)) ||
        !(std::abs(p.tau) < 1.0))
      return fail("regions.tau_bound", "tau_nu_eps=" + format_double(p.tau_nu_eps) +
                                           " tau=" + format_double(p.tau));
  }
  return pass("regions.tau_bound");
}

namespace {

InvariantCheck disk_bound_impl(const char* id, Rng& rng, int n_z, bool use_f) {
  const auto pool = background_pool(rng, 4);
  const int n_r = std::max(8, static_cast<int>(std::sqrt(n_z)));
  const int n_a = (n_z + n_r - 1) / n_r;
  for (const Case& c : pool) {
    const RegionParams p = constants(c.borg);
    const double d = c.borg.d, s = c.borg.s;
    const double f_bound = (d - s) * (d - s) / (4.0 * d * d);
    const double g_bound = std::pow((d * d - s * s), 2) / (4.0 * std::pow(d, 4));
    const double lim = use_f ? f_bound : g_bound;
    for (int ir = 0; ir < n_r; ++ir)
      for (int ia = 0; ia < n_a; ++ia) {
        const double r = 0.999 * (ir + 1) / n_r;
        const double ang = 2.0 * M_PI * ia / n_a;
        const Complex z = std::polar(r, ang);
        const double got = std::abs(use_f ? disk_f(z, p) : disk_g(z, p));
        if (got < lim * (1.0 - 1e-9))
          return fail(id, "z=" + format_complex(z) + " got=" + format_double(got) +
                              " bound=" + format_double(lim));
      }
  }
  return pass(id);
}

}  // namespace

InvariantCheck disk_f_bound(Rng& rng, int n_z) {
  return disk_bound_impl("regions.disk_f_bound", rng, n_z, true);
}

InvariantCheck disk_g_bound(Rng& rng, int n_z) {
  return disk_bound_impl("regions.disk_g_bound", rng, n_z, false);
}

InvariantCheck criterion_linearity(Rng& rng, int n_cases) {
  const auto pool = background_pool(rng, 4);
  for (int i = 0; i < n_cases; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams p = constants(c.borg);
    const Complex lambda = sample_lambda(rng, c.borg);
    const double total0 = rng.uniform(1e-8, 1e-2);
    const CriterionValue full = criterion_zero_moment(c.borg, p, total0, lambda);
    const CriterionValue half = criterion_zero_moment(c.borg, p, 0.5 * total0, lambda);
    if (full.excluded != half.excluded)
      return fail("regions.criterion_linearity", "exclusion flip at " + format_complex(lambda));
    if (full.excluded) continue;
    if (*half.lhs != 0.5 * *full.lhs)
      return fail("regions.criterion_linearity",
                  describe(lambda, *half.lhs, 0.5 * *full.lhs));
  }
  return pass("regions.criterion_linearity");
}

InvariantCheck oracle_zero_perturbation(Rng&, int truncation) {
  const BorgData borg{1.0, 3.0, 0.0, -1};
  const Background bg = reconstruct(borg);
  const OracleResult r = truncated_eigs(Perturbation::none(), bg, truncation);
  if (!r.filtered.empty())
    return fail("verify.oracle_zero_perturbation",
                std::to_string(r.filtered.size()) +
                    " gap/exterior eigenvalues for the unperturbed background");
  return pass("verify.oracle_zero_perturbation");
}

InvariantCheck oracle_jost_cross(Rng&, int truncation) {
  const BorgData borg{1.0, 3.0, 0.0, -1};
  const Background bg = reconstruct(borg);
  Perturbation pert;
  pert.support = 1;
  pert.a = {Complex(bg.a1, 0.0)};
  pert.c = {Complex(bg.a1, 0.0)};
  pert.b = {Complex(bg.b1, 5.0)};  // large single-site bump creates one eigenvalue
  const OracleResult r = truncated_eigs(pert, bg, truncation);
  if (r.filtered.empty())
    return fail("verify.oracle_jost_cross", "no stable eigenvalue from the 5i bump");
  for (const Complex& star : r.filtered) {
    const auto zero = refine_zero(pert, borg, bg, star);
    if (!zero)
      return fail("verify.oracle_jost_cross", "no Jost zero near " + format_complex(star));
    if (std::abs(*zero - star) > 1e-6 * (1.0 + std::abs(star)))
      return fail("verify.oracle_jost_cross",
                  "zero/eigenvalue mismatch " + format_double(std::abs(*zero - star)));
    const WindingResult wr =
        winding(pert, borg, bg, ContourSpec::circle(star, 1e-3), 64);
    if (wr.zeros_inside < 1)
      return fail("verify.oracle_jost_cross", "winding 0 around " + format_complex(star));
  }
  return pass("verify.oracle_jost_cross");
}

InvariantCheck enclosure_soundness(Rng& rng, int n_perturbations, int truncation) {
  const auto pool = background_pool(rng, 0);
  for (int i = 0; i < n_perturbations; ++i) {
    const Case& c = pool[static_cast<std::size_t>(i) % pool.size()];
    const RegionParams params = constants(c.borg);
    Perturbation pert = random_perturbation(rng, c.bg, 8, 0.4);
    const MomentSummary raw = moments(pert, c.bg);
    if (raw.total0 > 0.0) pert = scale_perturbation(pert, c.bg, 1e-4 / raw.total0);
    const MomentSummary ms = moments(pert, c.bg);
    const OracleResult r = truncated_eigs(pert, c.bg, truncation);
    for (const Complex& star : r.filtered) {
      const CriterionValue cv = criterion_zero_moment(c.borg, params, ms.total0, star);
      if (cv.in_G)
        return fail("verify.enclosure_soundness",
                    "filtered eigenvalue inside G: " + format_complex(star));
    }
  }
  return pass("verify.enclosure_soundness");
}

InvariantCheck count_conservation(Rng& rng, int n_perturbations, int truncation) {
  // Exact-count comparison needs draws whose eigenvalues sit cleanly on one
  // side of the distance filter; draws with an eigenvalue in the fuzzy
  // window around the margin (or an unconverged one far from the bands)
  // are redrawn.
  int done = 0;
  for (int attempts = 0; done < n_perturbations; ++attempts) {
    if (attempts > 30 * n_perturbations)
      return fail("verify.count_conservation", "could not draw unambiguous cases");
    BorgData borg = random_borg(rng);
    borg.eps = -1;
    const Background bg = reconstruct(borg);
    const Perturbation pert = random_perturbation(rng, bg, 5, 0.9);
    const double margin = oracle_filter_margin(bg);
    const OracleResult r = truncated_eigs(pert, bg, truncation);
    bool ambiguous = false;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      const double dist = borg.dist_continuous_spectrum(r.eigenvalues[i]);
      if (dist > 0.6 * margin && dist < 2.0 * margin) ambiguous = true;
      if (!r.stable[i] && dist >= 2.0 * margin) ambiguous = true;
    }
    if (ambiguous) continue;
    ++done;
    const std::vector<Complex> zeros = locate_all_zeros(pert, borg, bg, margin);
    const auto outside_margin = [&](Complex z) {
      return borg.dist_continuous_spectrum(z) > margin;
    };
    std::size_t zero_count = 0;
    for (const Complex& z : zeros)
      if (outside_margin(z)) ++zero_count;
    std::size_t eig_count = 0;
    for (const Complex& e : r.filtered)
      if (outside_margin(e)) ++eig_count;
    if (zero_count != eig_count)
      return fail("verify.count_conservation",
                  "zeros=" + std::to_string(zero_count) +
                      " filtered=" + std::to_string(eig_count));
  }
  return pass("verify.count_conservation");
}

}  // namespace checks

InvariantReport run_invariant_suite(std::uint64_t seed, int n_cases, int threads) {
  if (n_cases < 1) throw std::invalid_argument("run_invariant_suite: n_cases must be >= 1");
  InvariantReport rep;
  rep.seed = seed;
  rep.n_cases = n_cases;

  using Runner = std::function<InvariantCheck(Rng&)>;
  const int nl = n_cases;
  const int small = std::max(4, n_cases / 10);
  const int heavy_trunc = 100;
  std::vector<Runner> runners = {
      [&](Rng& r) { return checks::hill_roundtrip(r, nl); },
      [&](Rng& r) { return checks::band_edge_roots(r, nl); },
      [&](Rng& r) { return checks::reconstruction_bounds(r, nl); },
      [&](Rng& r) { return checks::floquet_identities(r, nl); },
      [&](Rng& r) { return checks::floquet_modulus(r, nl); },
      [&](Rng& r) { return checks::wronskian(r, nl); },
      [&](Rng& r) { return checks::weyl_product(r, nl); },
      [&](Rng& r) { return checks::weyl_closed_form(r, nl); },
      [&](Rng& r) { return checks::conjugate_symmetry(r, small); },
      [&](Rng& r) { return checks::psi_recurrence(r, small); },
      [&](Rng& r) { return checks::green_delta(r, small); },
      [&](Rng& r) { return checks::chi1_bound(r, nl); },
      [&](Rng& r) { return checks::green_tilde_bound(r, small); },
      [&](Rng& r) { return checks::kernel_bound(r, small); },
      [&](Rng& r) { return checks::kernel_first_moment_bound(r, small); },
      [&](Rng& r) { return checks::moments_product_only(r, small); },
      [&](Rng& r) { return checks::solver_agreement(r, small); },
      [&](Rng& r) { return checks::integral_equation(r, small); },
      [&](Rng& r) { return checks::solution_bound(r, small); },
      [&](Rng& r) { return checks::jost_far_field(r, std::min(small, 8)); },
      [&](Rng& r) { return checks::jost_contour_mean(r, std::min(small, 6)); },
      [&](Rng& r) { return checks::omega_root(r, 1); },
      [&](Rng& r) { return checks::k2_dual_formula(r, 100); },
      [&](Rng& r) { return checks::tau_bound(r, nl); },
      [&](Rng& r) { return checks::disk_f_bound(r, std::max(400, 4 * n_cases)); },
      [&](Rng& r) { return checks::disk_g_bound(r, std::max(400, 4 * n_cases)); },
      [&](Rng& r) { return checks::criterion_linearity(r, nl); },
      [&](Rng& r) { return checks::oracle_zero_perturbation(r, heavy_trunc); },
      [&](Rng& r) { return checks::oracle_jost_cross(r, heavy_trunc); },
      [&](Rng& r) { return checks::enclosure_soundness(r, 4, heavy_trunc); },
      [&](Rng& r) { return checks::count_conservation(r, 2, heavy_trunc); },
  };

  rep.checks.resize(runners.size());
  parallel_for(0, static_cast<int>(runners.size()), threads, [&](int i) {
    Rng rng(seed * 1000003u + static_cast<std::uint64_t>(i));
    try {
      rep.checks[static_cast<std::size_t>(i)] = runners[static_cast<std::size_t>(i)](rng);
    } catch (const std::exception& e) {
      rep.checks[static_cast<std::size_t>(i)] =
          InvariantCheck{"runner_" + std::to_string(i), false,
                         std::string("exception: ") + e.what()};
    }
  });
  return rep;
}

std::string to_json(const InvariantReport& report) {
  std::string out = "{\n  \"seed\": " + std::to_string(report.seed) +
                    ",\n  \"n_cases\": " + std::to_string(report.n_cases) +
                    ",\n  \"all_passed\": " + (report.all_passed() ? "true" : "false") +
                    ",\n  \"checks\": [\n";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const InvariantCheck& c = report.checks[i];
    out += "    {\"id\": \"" + json_escape(c.id) + "\", \"passed\": " +
           (c.passed ? "true" : "false") + ", \"detail\": \"" + json_escape(c.detail) + "\"}";
    out += (i + 1 < report.checks.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace jacobi2p
