#pragma once

#include <vector>

#include "jacobi2p/background.hpp"
#include "jacobi2p/types.hpp"

namespace jacobi2p {

/// A finitely supported complex perturbation of the background: entries
/// a_n, b_n, c_n for 1 <= n <= support, with a_n c_n != 0; all entries
/// beyond the support (and the formal index-0 entries) equal the background.
/// Indexing is 1-based to match the recurrence.
struct Perturbation {
  int support = 0;
  std::vector<Complex> a;  // a[i] is the entry with index i+1
  std::vector<Complex> b;
  std::vector<Complex> c;

  static Perturbation none() { return {}; }

  void validate() const;

  Complex entry_a(int n, const Background& bg) const;
  Complex entry_b(int n, const Background& bg) const;
  Complex entry_c(int n, const Background& bg) const;

  /// d_m = |b0_m - b_m| + |a0_{m-1} - a_{m-1} c_{m-1} / a0_{m-1}|.
  double d_m(int m, const Background& bg) const;
};

/// All perturbation moments; sums are exact by finite support.
struct MomentSummary {
  std::vector<double> d_seq;  // d_1 .. d_{support+1}
  double total0 = 0.0;        // sum d_m
  double total1 = 0.0;        // sum m d_m

  /// kappa0(n) = sum_{m > n} d_m, zero for n >= support + 1.
  double kappa0(int n) const;
  /// kappa1(n) = sum_{m > n} (m - n) d_m.
  double kappa1(int n) const;
};

MomentSummary moments(const Perturbation& pert, const Background& bg);

/// Kernel of the discrete integral equation:
///   A(n,m) = (b0_m - b_m) G(n,m) + (a0_{m-1} - a_{m-1} c_{m-1} / a0_{m-1}) G(n,m-1).
/// Zero for m <= n and for m > support + 1.
Complex kernel_A(const Perturbation& pert, const BorgData& borg, const Background& bg,
                 Complex lambda, int n, int m);
Complex kernel_A(const Perturbation& pert, const BackgroundEval& ev, const Background& bg,
                 int n, int m);

/// A(n,m) * w^{m-n}, assembled from the bounded Green form.
Complex kernel_A_tilde(const Perturbation& pert, const BorgData& borg, const Background& bg,
                       Complex lambda, int n, int m);
Complex kernel_A_tilde(const Perturbation& pert, const BackgroundEval& ev,
                       const Background& bg, int n, int m);

}  // namespace jacobi2p
