#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jacobi2p {

using Complex = std::complex<double>;

/// Thrown when an evaluation point is too close to a spectral singularity
/// (band edge or Weyl pole) for the requested operation.
class NearSingularError : public std::runtime_error {
 public:
  explicit NearSingularError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative procedure fails to converge (eigenvalue QR,
/// winding-step refinement, zero refinement).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Spectral data {-d, -s, s, d, nu, eps} of a 2-periodic background in
/// normal form: the bands [-d,-s] and [s,d] are symmetric about the origin.
///
/// nu is the root of the second 'sin'-type polynomial and lies strictly
/// inside the gap (-s, s).  eps = +1 means the Weyl function m has a pole
/// at nu (nu is an eigenvalue of the half-line background); eps = -1 means
/// the background spectrum is purely continuous.
struct BorgData {
  double s = 1.0;
  double d = 2.0;
  double nu = 0.0;
  int eps = -1;

  void validate() const;

  bool weyl_pole_at_nu() const { return eps == +1; }

  /// Euclidean distance from lambda to [-d,-s] u [s,d].
  double dist_continuous_spectrum(Complex lambda) const;

  /// Distance to the nearest of the four band edges {-d, -s, s, d}.
  double dist_band_edges(Complex lambda) const;
};

/// Entries of a 2-periodic background.  The off-diagonal sequence is
/// a1, a2, a1, a2, ... with the wrap-around convention a_0 = a_2; the
/// diagonal is b1, b2, b1, ...  Normal form requires b2 = -b1.
struct Background {
  double a1 = 1.0, a2 = 1.0;
  double b1 = 0.0, b2 = 0.0;

  double a(int n) const { return (n % 2 != 0) ? a1 : a2; }  // n >= 0
  double b(int n) const { return (n % 2 != 0) ? b1 : b2; }  // n >= 1

  /// Band edges implied by the entries (inverse of the reconstruction).
  double band_s() const;
  double band_d() const;

  void validate() const;
};

/// A value that may sit at a pole of the Weyl functions.  Poles are carried
/// explicitly; downstream code never sees NaN/inf arithmetic.
struct PoleAware {
  Complex value{0.0, 0.0};
  bool pole = false;

  static PoleAware of(Complex v) { return {v, false}; }
  static PoleAware at_pole() { return {{0.0, 0.0}, true}; }
};

/// w^k for integer k (k may be negative; w must be nonzero for k < 0).
Complex pow_i(Complex w, int k);

}  // namespace jacobi2p
