#include "jacobi2p/regions.hpp"

#include <cmath>

#include "jacobi2p/parallel.hpp"

namespace jacobi2p {

double omega_constant() {
  // x e^x = 1 has one positive root; Newton from 0.5 with a bisection
  // safeguard on [0.5, 0.6].
  double lo = 0.5, hi = 0.6, x = 0.5;
  for (int i = 0; i < 60; ++i) {
    const double ex = std::exp(x);
    const double r = x * ex - 1.0;
    if (r > 0.0) hi = x; else lo = x;
    double step = r / (ex * (1.0 + x));
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) break;
    x = xn;
  }
  return x;
}

double k2_closed_form(double s, double d) {
  return 1024.0 * std::sqrt(2.0) * std::pow(d, 5) /
         (std::pow(d - s, 5) * std::sqrt(d * d - s * s));
}

RegionParams constants(const BorgData& borg) {
  borg.validate();
  const double s = borg.s, d = borg.d, nu = borg.nu;
  RegionParams p;
  p.K1 = 256.0 * d * d * d / std::pow(d - s, 4);
  p.K2 = p.K1 * 4.0 * std::sqrt(2.0) * d * d / ((d - s) * std::sqrt(d * d - s * s));
  p.t = omega_constant();
  p.tau_nu_eps =
      (borg.eps * std::sqrt((d * d - nu * nu) * (s * s - nu * nu)) - nu * nu) / (d * d);
  p.tau = borg.eps * s / d;
  p.xi = (d * d + s * s) / (2.0 * d * d);
  const Complex w_nu = floquet_w(borg, Complex(nu, 0.0));
  const Complex w2 = w_nu * w_nu;
  p.w2eps_nu = (borg.eps == +1) ? w2 : 1.0 / w2;
  p.abs_w_nu_sq = std::norm(w_nu);
  return p;
}

namespace {

Complex disk_root(Complex z, double tau) {
  // principal sqrt of (1-z)(1-tau^2 z); both factors have positive real
  // part on the unit disk, so the product never crosses the negative axis
  return std::sqrt((1.0 - z) * (1.0 - tau * tau * z));
}

}  // namespace

Complex disk_f(Complex z, const RegionParams& p) {
  return 1.0 + p.tau_nu_eps * z + disk_root(z, p.tau);
}

Complex disk_g(Complex z, const RegionParams& p) {
  return 1.0 - p.xi * z + disk_root(z, p.tau);
}

CriterionValue criterion_zero_moment(const BorgData& borg, const RegionParams& params,
                                     double total0, Complex lambda) {
  if (total0 < 0.0)
    throw std::invalid_argument("criterion_zero_moment: total0 must be >= 0");
  CriterionValue cv;
  const Complex w = floquet_w(borg, lambda);
  cv.abs_w = std::abs(w);
  const Complex w2 = w * w;
  const double denom_edge = std::abs(1.0 - w2 * w2);
  const double denom_pole = std::abs(w2 - params.w2eps_nu);
  if (denom_edge <= 1e-12 || denom_pole <= 1e-12) {
    cv.excluded = true;
    cv.in_G = false;
    return cv;
  }
  cv.lhs = params.K2 * cv.abs_w / (denom_pole * denom_edge) * total0;
  cv.in_G = *cv.lhs < params.t;
  return cv;
}

EmptinessResult criterion_first_moment_empty(const BorgData& borg,
                                             const RegionParams& params, double total1) {
  borg.validate();
  if (borg.eps != -1)
    throw std::invalid_argument(
        "criterion_first_moment_empty: requires a background with purely "
        "continuous spectrum (eps = -1)");
  if (total1 < 0.0)
    throw std::invalid_argument("criterion_first_moment_empty: total1 must be >= 0");
  EmptinessResult r;
  r.t = params.t;
  r.lhs = params.K2 / (1.0 - params.abs_w_nu_sq) * total1;
  r.empty_guaranteed = r.lhs < r.t;
  return r;
}

Complex GridSpec::point(int ix, int iy) const {
  const double x = (nx == 1) ? re0 : re0 + (re1 - re0) * ix / (nx - 1);
  const double y = (ny == 1) ? im0 : im0 + (im1 - im0) * iy / (ny - 1);
  return {x, y};
}

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx, ny must be >= 1");
  if (nx > 1 && !(re1 > re0))
    throw std::invalid_argument("GridSpec: need re1 > re0 when nx > 1");
  if (ny > 1 && !(im1 > im0))
    throw std::invalid_argument("GridSpec: need im1 > im0 when ny > 1");
}

RegionReport scan(const BorgData& borg, const RegionParams& params, double total0,
                  const GridSpec& grid, int threads) {
  grid.validate();
  RegionReport report;
  report.grid = grid;
  report.total0 = total0;
  report.samples.resize(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  parallel_for(0, grid.nx * grid.ny, threads, [&](int idx) {
    const int iy = idx / grid.nx;
    const int ix = idx % grid.nx;
    const Complex lambda = grid.point(ix, iy);
    report.samples[static_cast<std::size_t>(idx)] = {
        lambda, criterion_zero_moment(borg, params, total0, lambda)};
  });
  return report;
}

}  // namespace jacobi2p
