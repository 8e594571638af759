#pragma once

#include <vector>

#include "jacobi2p/perturbation.hpp"

namespace jacobi2p {

/// Solution of the discrete integral equation for the Jost solution.
///
/// v_n agrees with the Weyl solution psi_n exactly for n > support, and
/// V_n = (v_n - psi_n) w^{-n} is the normalized deviation the series
/// bounds speak about.
struct JostSolution {
  Complex lambda;
  std::vector<Complex> v;  // v_0 .. v_{support+2}
  std::vector<Complex> V;  // V_0 .. V_{support+2}
  double recurrence_residual = 0.0;
  int series_terms_used = 0;  // 0 for the back-substitution solver
  bool converged = true;
  bool conditioning_warning = false;
};

/// Margin around band edges and the Weyl pole inside which evaluation is
/// refused (the bounds blow up there by design).
inline constexpr double kJostExclusionMargin = 1e-6;

/// Exact solver: the kernel is strictly upper triangular with finite
/// support, so backward substitution from n = support down to 0 solves
/// the equation outright.
JostSolution solve_backsub(const Perturbation& pert, const BorgData& borg,
                           const Background& bg, Complex lambda);

/// Successive-approximation solver (the constructive route whose bounds
/// the tests exercise).  Stops when the newest term falls below tol or
/// after j_max terms; with finite support the iteration is nilpotent and
/// terminates exactly after at most support + 1 terms.
JostSolution solve_series(const Perturbation& pert, const BorgData& borg,
                          const Background& bg, Complex lambda, double tol = 1e-12,
                          int j_max = 200);

/// The Jost function v_0; its zeros off the continuous spectrum are the
/// eigenvalues of the perturbed operator.
Complex jost_value(const Perturbation& pert, const BorgData& borg, const Background& bg,
                   Complex lambda);

/// Throws NearSingularError when lambda is within the exclusion margin of
/// a band edge, or of nu when the Weyl function has a pole there.
void require_admissible(const BorgData& borg, Complex lambda);

}  // namespace jacobi2p
