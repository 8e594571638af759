#pragma once

#include <optional>
#include <vector>

#include "jacobi2p/background.hpp"

namespace jacobi2p {

/// The explicit constants entering the enclosure criteria, computed once
/// per background.  w2eps_nu caches w(nu)^{2 eps} in the gap-limit branch.
struct RegionParams {
  double K1 = 0.0;          // 256 d^3 / (d-s)^4
  double K2 = 0.0;          // K1 * 4 sqrt(2) d^2 / ((d-s) sqrt(d^2-s^2))
  double t = 0.0;           // positive root of x e^x = 1
  double tau_nu_eps = 0.0;  // (eps sqrt((d^2-nu^2)(s^2-nu^2)) - nu^2) / d^2
  double tau = 0.0;         // eps s / d
  double xi = 0.0;          // (d^2 + s^2) / (2 d^2)
  Complex w2eps_nu;
  double abs_w_nu_sq = 0.0;  // |w(nu)|^2
};

/// Root of x e^x = 1 by safeguarded Newton; residual below 1e-14.
double omega_constant();

/// The K2 constant in its single closed form; must agree with the chained
/// product in RegionParams to 1e-12 relative.
double k2_closed_form(double s, double d);

RegionParams constants(const BorgData& borg);

/// Auxiliary disk functions with explicit lower bounds:
///   f(z) = 1 + tau_nu_eps z + sqrt((1-z)(1-tau^2 z)),  |f| >= (d-s)^2/(4d^2)
///   g(z) = 1 - xi z       + sqrt((1-z)(1-tau^2 z)),  |g| >= (d^2-s^2)^2/(4d^4)
/// The square root is the principal branch, positive on (-1, 1).
Complex disk_f(Complex z, const RegionParams& p);
Complex disk_g(Complex z, const RegionParams& p);

/// Pointwise zero-moment criterion.  lhs is empty at excluded points
/// (band edges where w^4 = 1, and nu when the Weyl function has a pole);
/// in_G is false there.
struct CriterionValue {
  double abs_w = 0.0;
  std::optional<double> lhs;
  bool in_G = false;
  bool excluded = false;
};

CriterionValue criterion_zero_moment(const BorgData& borg, const RegionParams& params,
                                     double total0, Complex lambda);

/// Global first-moment emptiness test; only meaningful for a background
/// with purely continuous spectrum (eps = -1), rejected otherwise.
struct EmptinessResult {
  bool empty_guaranteed = false;
  double lhs = 0.0;
  double t = 0.0;
};

EmptinessResult criterion_first_moment_empty(const BorgData& borg,
                                             const RegionParams& params, double total1);

/// Rectangular lambda grid, row-major over (iy, ix): index = iy * nx + ix.
/// nx (ny) == 1 samples at re0 (im0).
struct GridSpec {
  double re0 = 0.0, im0 = 0.0;
  double re1 = 0.0, im1 = 0.0;
  int nx = 1, ny = 1;

  Complex point(int ix, int iy) const;
  void validate() const;
};

struct RegionSample {
  Complex lambda;
  CriterionValue value;
};

struct RegionReport {
  GridSpec grid;
  double total0 = 0.0;
  std::vector<RegionSample> samples;
};

RegionReport scan(const BorgData& borg, const RegionParams& params, double total0,
                  const GridSpec& grid, int threads = 1);

}  // namespace jacobi2p
