#include "jacobi2p/background.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi2p {

namespace {

double dist_to_segment(Complex z, double lo, double hi) {
  const double x = std::clamp(z.real(), lo, hi);
  return std::hypot(z.real() - x, z.imag());
}

}  // namespace

void BorgData::validate() const {
  if (!(s > 0.0)) throw std::invalid_argument("BorgData: s must be positive");
  if (!(s < d)) throw std::invalid_argument("BorgData: need 0 < s < d");
  if (!(std::abs(nu) < s))
    throw std::invalid_argument("BorgData: need |nu| < s (strictly inside the gap)");
  if (eps != 1 && eps != -1) throw std::invalid_argument("BorgData: eps must be +1 or -1");
  if (!std::isfinite(s) || !std::isfinite(d) || !std::isfinite(nu))
    throw std::invalid_argument("BorgData: entries must be finite");
}

double BorgData::dist_continuous_spectrum(Complex lambda) const {
  return std::min(dist_to_segment(lambda, -d, -s), dist_to_segment(lambda, s, d));
}

double BorgData::dist_band_edges(Complex lambda) const {
  double best = std::abs(lambda - Complex(d, 0));
  for (double e : {-d, -s, s}) best = std::min(best, std::abs(lambda - Complex(e, 0)));
  return best;
}

void Background::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0))
    throw std::invalid_argument("Background: off-diagonal entries must be positive");
  if (std::abs(b1 + b2) > 1e-12 * (1.0 + std::abs(b1)))
    throw std::invalid_argument("Background: normal form requires b2 = -b1");
  if (std::abs(a1 - a2) <= 1e-12 * (a1 + a2))
    throw std::invalid_argument("Background: degenerate a1 = a2 is not supported");
}

double Background::band_s() const { return std::sqrt(b1 * b1 + (a1 - a2) * (a1 - a2)); }

double Background::band_d() const { return std::sqrt(b1 * b1 + (a1 + a2) * (a1 + a2)); }

Complex pow_i(Complex w, int k) {
  if (k < 0) return 1.0 / pow_i(w, -k);
  Complex r{1.0, 0.0};
  Complex base = w;
  unsigned e = static_cast<unsigned>(k);
  while (e != 0) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

Background reconstruct(const BorgData& borg) {
  borg.validate();
  const double s2 = borg.s * borg.s, d2 = borg.d * borg.d, n2 = borg.nu * borg.nu;
  const double root = std::sqrt((d2 - n2) * (s2 - n2));
  const double a1sq = (d2 + s2 - 2.0 * n2 - 2.0 * borg.eps * root) / 4.0;
  const double a2sq = (d2 + s2 - 2.0 * n2 + 2.0 * borg.eps * root) / 4.0;
  Background bg;
  bg.a1 = std::sqrt(a1sq);
  bg.a2 = std::sqrt(a2sq);
  bg.b1 = borg.nu;
  bg.b2 = 0.0 - borg.nu;  // keeps +0.0 when nu == 0
  bg.validate();
  return bg;
}

Complex hill_u(const BorgData& borg, Complex lambda) {
  const double s2 = borg.s * borg.s, d2 = borg.d * borg.d;
  return 2.0 * (lambda * lambda - 0.5 * (d2 + s2)) / (d2 - s2);
}

Complex hill_u(const Background& bg, Complex lambda) {
  return (lambda * lambda - (bg.b1 + bg.b2) * lambda + bg.b1 * bg.b2 - bg.a1 * bg.a1 -
          bg.a2 * bg.a2) /
         (2.0 * bg.a1 * bg.a2);
}

namespace {

// rho and w for real lambda, as the limit from the upper half-plane.
FloquetValue floquet_real(double x, Complex u_c) {
  const double u = u_c.real();
  if (u >= 1.0) {
    // |lambda| >= d: rho in (0, 1], w real with the sign of lambda.
    const double r = u - std::sqrt(u * u - 1.0);
    const double wr = std::sqrt(r);
    return {Complex(r, 0.0), Complex(x >= 0.0 ? wr : -wr, 0.0)};
  }
  if (u <= -1.0) {
    // gap: rho in [-1, 0), w on the negative imaginary axis.
    const double r = u + std::sqrt(u * u - 1.0);
    return {Complex(r, 0.0), Complex(0.0, -std::sqrt(-r))};
  }
  // band: |rho| = 1; the C+ limit puts rho below the axis for lambda > 0
  // and above it for lambda < 0, and w on the lower unit semicircle.
  const double t = std::sqrt(1.0 - u * u);
  const Complex rho(u, x > 0.0 ? -t : t);
  const Complex wp = std::sqrt(rho);  // principal: arg in (-pi/2, pi/2]
  return {rho, x > 0.0 ? wp : -wp};
}

}  // namespace

FloquetValue floquet(const BorgData& borg, Complex lambda) {
  if (lambda.imag() == 0.0) return floquet_real(lambda.real(), hill_u(borg, lambda.real()));
  if (lambda.imag() < 0.0) {
    FloquetValue f = floquet(borg, std::conj(lambda));
    return {std::conj(f.rho), std::conj(f.w)};
  }
  const Complex u = hill_u(borg, lambda);
  const Complex sq = std::sqrt(u * u - 1.0);
  // Roots come in a reciprocal pair; form the small one as the reciprocal
  // of the large one for stability.
  const Complex big = (std::abs(u + sq) >= std::abs(u - sq)) ? u + sq : u - sq;
  const Complex rho = 1.0 / big;
  // Off the real axis rho never lands on [0, inf), so exactly one square
  // root lies in the lower half-plane.  Floating-point can still round a
  // nearly-real rho onto the axis; fall back to the sign of Re(lambda).
  Complex w = std::sqrt(rho);
  if (w.imag() > 0.0) {
    w = -w;
  } else if (w.imag() == 0.0 && ((lambda.real() >= 0.0) != (w.real() >= 0.0))) {
    w = -w;
  }
  return {rho, w};
}

FundamentalPair fundamental_polys(const Background& bg, Complex lambda, int n_max) {
  if (n_max < 3) throw std::invalid_argument("fundamental_polys: n_max must be >= 3");
  FundamentalPair fp;
  fp.lambda = lambda;
  fp.s_vals.resize(static_cast<std::size_t>(n_max) + 1);
  fp.c_vals.resize(static_cast<std::size_t>(n_max) + 1);
  fp.s_vals[0] = 0.0;
  fp.s_vals[1] = 1.0;
  fp.c_vals[0] = 1.0;
  fp.c_vals[1] = 0.0;
  for (int n = 1; n < n_max; ++n) {
    const double a_prev = bg.a(n - 1), a_next = bg.a(n), b_n = bg.b(n);
    fp.s_vals[n + 1] = ((lambda - b_n) * fp.s_vals[n] - a_prev * fp.s_vals[n - 1]) / a_next;
    fp.c_vals[n + 1] = ((lambda - b_n) * fp.c_vals[n] - a_prev * fp.c_vals[n - 1]) / a_next;
  }
  return fp;
}

BackgroundEval evaluate(const BorgData& borg, const Background& bg, Complex lambda) {
  BackgroundEval ev;
  ev.lambda = lambda;
  ev.u = hill_u(borg, lambda);
  ev.v = (lambda * lambda - borg.nu * borg.nu - bg.a1 * bg.a1 + bg.a2 * bg.a2) /
         (2.0 * bg.a1 * bg.a2);
  const FloquetValue f = floquet(borg, lambda);
  ev.rho = f.rho;
  ev.w = f.w;
  ev.sqrt_u2m1 = ev.u - ev.rho;

  const Complex w2 = ev.w * ev.w;
  // Exact regularizations of the Weyl pair: the classical quotients
  // (v -/+ (u^2-1)^{1/2}) / s_2 rearrange to these pole-free products.
  ev.reg_m = bg.a1 * w2 + bg.a2;
  ev.reg_mhat_w2 = bg.a2 * w2 + bg.a1;

  const bool at_nu = (lambda == Complex(borg.nu, 0.0));
  if (at_nu && borg.eps == +1) {
    ev.m = PoleAware::at_pole();
    ev.chi1 = PoleAware::at_pole();
  } else {
    ev.m = PoleAware::of((lambda + borg.nu) * w2 / ev.reg_mhat_w2);
    ev.chi1 = PoleAware::of((lambda + borg.nu) * ev.w / ev.reg_mhat_w2);
  }
  if (at_nu && borg.eps == -1) {
    ev.mhat = PoleAware::at_pole();
  } else {
    ev.mhat = PoleAware::of((lambda + borg.nu) / ev.reg_m);
  }
  return ev;
}

PoleAware weyl_solution(const BackgroundEval& ev, int n) {
  if (n < 0) throw std::invalid_argument("weyl_solution: n must be >= 0");
  const Complex rp = pow_i(ev.rho, n / 2);
  if (n % 2 == 0) return PoleAware::of(rp);
  if (ev.m.pole) return PoleAware::at_pole();
  return PoleAware::of(rp * ev.m.value);
}

PoleAware weyl_solution(const BorgData& borg, const Background& bg, Complex lambda, int n) {
  return weyl_solution(evaluate(borg, bg, lambda), n);
}

PoleAware weyl_solution_hat(const BackgroundEval& ev, int n) {
  if (n < 0) throw std::invalid_argument("weyl_solution_hat: n must be >= 0");
  const Complex rp = pow_i(ev.rho, -(n / 2));
  if (n % 2 == 0) return PoleAware::of(rp);
  if (ev.mhat.pole) return PoleAware::at_pole();
  return PoleAware::of(rp * ev.mhat.value);
}

PoleAware weyl_solution_hat(const BorgData& borg, const Background& bg, Complex lambda, int n) {
  return weyl_solution_hat(evaluate(borg, bg, lambda), n);
}

Complex green_tilde(const BackgroundEval& ev, const Background& bg, int n, int m) {
  if (m <= n) return {0.0, 0.0};
  const double D = 1.0 / (bg.a1 * bg.a2);  // 4 / (d^2 - s^2)
  const Complex w = ev.w;
  const Complex w2 = w * w;
  const Complex w4 = w2 * w2;
  const Complex one_m_w4 = 1.0 - w4;
  const bool n_even = (n % 2 == 0);
  const bool m_even = (m % 2 == 0);

  if (n_even == m_even) {
    // Same parity, k = (m-n)/2: (1 - w^{4k}) / (1 - w^4) written as an
    // explicit geometric sum, finite at band edges.
    const int k = (m - n) / 2;
    Complex geo{0.0, 0.0};
    Complex term{1.0, 0.0};
    for (int j = 0; j < k; ++j) {
      geo += term;
      term *= w4;
    }
    const Complex lam_pm_nu = n_even ? (ev.lambda - bg.b1) : (ev.lambda + bg.b1);
    return D * lam_pm_nu * w2 * geo;
  }
  if (n_even) {
    // n = 2p, m = 2q+1, k = q - p = (m-n-1)/2 >= 0.
    const int k = (m - n - 1) / 2;
    return D * (w * ev.reg_mhat_w2 - pow_i(w, 4 * k + 3) * ev.reg_m) / one_m_w4;
  }
  // n = 2p+1, m = 2q, k = q - p = (m-n+1)/2 >= 1.
  const int k = (m - n + 1) / 2;
  return D * (w * ev.reg_m - pow_i(w, 4 * k - 1) * ev.reg_mhat_w2) / one_m_w4;
}

Complex green(const BackgroundEval& ev, const Background& bg, int n, int m) {
  if (m <= n) return {0.0, 0.0};
  return green_tilde(ev, bg, n, m) * pow_i(ev.w, n - m);
}

Complex green(const BorgData& borg, const Background& bg, Complex lambda, int n, int m) {
  if (m <= n) return {0.0, 0.0};
  return green(evaluate(borg, bg, lambda), bg, n, m);
}

}  // namespace jacobi2p
