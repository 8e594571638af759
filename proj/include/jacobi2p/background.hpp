#pragma once

#include <vector>

#include "jacobi2p/types.hpp"

namespace jacobi2p {

/// Floquet multiplier rho (the root of r^2 - 2*u*r + 1 = 0 with |r| <= 1)
/// and its square root w, with branches resolved by the limit from the
/// upper half-plane: w maps C+ into the closed lower half of the unit disk.
struct FloquetValue {
  Complex rho;
  Complex w;
};

/// Everything the background contributes at one spectral point.
///
/// m and mhat carry explicit pole markers at nu; the regularized products
/// reg_m = (lambda - nu) * m and reg_mhat_w2 = (lambda - nu) * mhat * w^2
/// are always finite and are what the Green-function formulas consume.
struct BackgroundEval {
  Complex lambda;
  Complex u;            // Hill discriminant
  Complex v;            // companion polynomial (s3 - c2)/2
  Complex sqrt_u2m1;    // branch-resolved (u^2 - 1)^{1/2} = u - rho
  Complex rho;          // Floquet multiplier, |rho| <= 1
  Complex w;            // square root of rho, C+ -> lower half-disk branch
  PoleAware m;          // Weyl function
  PoleAware mhat;       // second-branch Weyl function
  Complex reg_m;        // (lambda - nu) m; equals a1 w^2 + a2
  Complex reg_mhat_w2;  // (lambda - nu) mhat w^2; equals a2 w^2 + a1
  PoleAware chi1;       // psi_1 / w, the 2-periodic factor of the Weyl solution
};

/// 'sin'- and 'cos'-type solutions s_n, c_n of the background recurrence,
/// with s_0 = 0, s_1 = 1, c_0 = 1, c_1 = 0; entries 0..n_max.
struct FundamentalPair {
  std::vector<Complex> s_vals;
  std::vector<Complex> c_vals;
  Complex lambda;
};

/// Restore the 2-periodic entries from spectral data.
///
/// eps = +1 yields a1 < a2, eps = -1 yields a1 > a2; in both cases
/// a1 * a2 = (d^2 - s^2)/4 and b2 = -b1 = -nu.
Background reconstruct(const BorgData& borg);

/// Hill discriminant from the spectral data: 2 (lambda^2 - (d^2+s^2)/2) / (d^2-s^2).
Complex hill_u(const BorgData& borg, Complex lambda);

/// Hill discriminant from the entries.  Agrees with the data route after
/// reconstruction; the two routes serve as each other's check.
Complex hill_u(const Background& bg, Complex lambda);

FloquetValue floquet(const BorgData& borg, Complex lambda);

inline Complex floquet_w(const BorgData& borg, Complex lambda) {
  return floquet(borg, lambda).w;
}

/// Fundamental solutions by direct three-term recursion, n_max >= 3.
FundamentalPair fundamental_polys(const Background& bg, Complex lambda, int n_max);

/// Evaluate all background spectral functions at lambda.  Total: poles are
/// marked, never thrown.  bg must be reconstruct(borg).
BackgroundEval evaluate(const BorgData& borg, const Background& bg, Complex lambda);

/// Weyl solution psi_n (psi_0 = 1, psi_1 = m, psi_{n+2} = rho psi_n).
PoleAware weyl_solution(const BorgData& borg, const Background& bg, Complex lambda, int n);
PoleAware weyl_solution(const BackgroundEval& ev, int n);

/// Second Weyl solution psihat_n (psihat_{n+2} = psihat_n / rho).
PoleAware weyl_solution_hat(const BorgData& borg, const Background& bg, Complex lambda, int n);
PoleAware weyl_solution_hat(const BackgroundEval& ev, int n);

/// One-sided Green function of the unperturbed problem: zero for m <= n,
/// and for m > n the unique kernel with
///   a_{n-1} G(n-1,m) + (b_n - lambda) G(n,m) + a_n G(n+1,m) = delta_{n,m}.
/// Computed from parity-split regularized products, finite at lambda = nu.
Complex green(const BorgData& borg, const Background& bg, Complex lambda, int n, int m);
Complex green(const BackgroundEval& ev, const Background& bg, int n, int m);

/// G(n,m) * w^{m-n}, the bounded form used by the kernel estimates.
Complex green_tilde(const BackgroundEval& ev, const Background& bg, int n, int m);

}  // namespace jacobi2p
