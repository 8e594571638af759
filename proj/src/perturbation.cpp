#include "jacobi2p/perturbation.hpp"

#include <cmath>

namespace jacobi2p {

void Perturbation::validate() const {
  const auto n = static_cast<std::size_t>(support);
  if (support < 0) throw std::invalid_argument("Perturbation: support must be >= 0");
  if (a.size() != n || b.size() != n || c.size() != n)
    throw std::invalid_argument("Perturbation: a, b, c must each have 'support' entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == Complex{0.0, 0.0} || c[i] == Complex{0.0, 0.0})
      throw std::invalid_argument("Perturbation: a_n c_n != 0 is required");
  }
}

Complex Perturbation::entry_a(int n, const Background& bg) const {
  if (n >= 1 && n <= support) return a[static_cast<std::size_t>(n - 1)];
  return {bg.a(n), 0.0};
}

Complex Perturbation::entry_b(int n, const Background& bg) const {
  if (n >= 1 && n <= support) return b[static_cast<std::size_t>(n - 1)];
  return {bg.b(n), 0.0};
}

Complex Perturbation::entry_c(int n, const Background& bg) const {
  if (n >= 1 && n <= support) return c[static_cast<std::size_t>(n - 1)];
  return {bg.a(n), 0.0};
}

double Perturbation::d_m(int m, const Background& bg) const {
  if (m < 1) return 0.0;
  const double b0 = bg.b(m);
  const double a0 = bg.a(m - 1);
  const Complex prod_dev = a0 - entry_a(m - 1, bg) * entry_c(m - 1, bg) / a0;
  return std::abs(b0 - entry_b(m, bg)) + std::abs(prod_dev);
}

double MomentSummary::kappa0(int n) const {
  double sum = 0.0;
  for (std::size_t i = d_seq.size(); i-- > 0;) {
    const int m = static_cast<int>(i) + 1;
    if (m > n) sum += d_seq[i];
  }
  return sum;
}

double MomentSummary::kappa1(int n) const {
  double sum = 0.0;
  for (std::size_t i = d_seq.size(); i-- > 0;) {
    const int m = static_cast<int>(i) + 1;
    if (m > n) sum += (m - n) * d_seq[i];
  }
  return sum;
}

MomentSummary moments(const Perturbation& pert, const Background& bg) {
  pert.validate();
  MomentSummary ms;
  ms.d_seq.resize(static_cast<std::size_t>(pert.support) + 1);
  for (int m = 1; m <= pert.support + 1; ++m) {
    const double dm = pert.d_m(m, bg);
    ms.d_seq[static_cast<std::size_t>(m - 1)] = dm;
    ms.total0 += dm;
    ms.total1 += m * dm;
  }
  return ms;
}

namespace {

struct KernelWeights {
  Complex b_dev;  // b0_m - b_m
  Complex a_dev;  // a0_{m-1} - a_{m-1} c_{m-1} / a0_{m-1}
};

KernelWeights weights_at(const Perturbation& pert, const Background& bg, int m) {
  const double a0 = bg.a(m - 1);
  return {bg.b(m) - pert.entry_b(m, bg),
          a0 - pert.entry_a(m - 1, bg) * pert.entry_c(m - 1, bg) / a0};
}

}  // namespace

Complex kernel_A(const Perturbation& pert, const BackgroundEval& ev, const Background& bg,
                 int n, int m) {
  if (m <= n || m > pert.support + 1) return {0.0, 0.0};
  const KernelWeights kw = weights_at(pert, bg, m);
  return kw.b_dev * green(ev, bg, n, m) + kw.a_dev * green(ev, bg, n, m - 1);
}

Complex kernel_A(const Perturbation& pert, const BorgData& borg, const Background& bg,
                 Complex lambda, int n, int m) {
  if (m <= n || m > pert.support + 1) return {0.0, 0.0};
  return kernel_A(pert, evaluate(borg, bg, lambda), bg, n, m);
}

Complex kernel_A_tilde(const Perturbation& pert, const BackgroundEval& ev,
                       const Background& bg, int n, int m) {
  if (m <= n || m > pert.support + 1) return {0.0, 0.0};
  const KernelWeights kw = weights_at(pert, bg, m);
  return kw.b_dev * green_tilde(ev, bg, n, m) +
         kw.a_dev * green_tilde(ev, bg, n, m - 1) * ev.w;
}

Complex kernel_A_tilde(const Perturbation& pert, const BorgData& borg, const Background& bg,
                       Complex lambda, int n, int m) {
  if (m <= n || m > pert.support + 1) return {0.0, 0.0};
  return kernel_A_tilde(pert, evaluate(borg, bg, lambda), bg, n, m);
}

}  // namespace jacobi2p
