#include "jacobi2p/jost.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi2p {

void require_admissible(const BorgData& borg, Complex lambda) {
  if (borg.dist_band_edges(lambda) < kJostExclusionMargin)
    throw NearSingularError("jost: lambda within exclusion margin of a band edge");
  if (borg.weyl_pole_at_nu() &&
      std::abs(lambda - Complex(borg.nu, 0.0)) < kJostExclusionMargin)
    throw NearSingularError("jost: lambda within exclusion margin of the Weyl pole");
}

namespace {

struct TildeProblem {
  BackgroundEval ev;
  std::vector<Complex> chi;                  // psi_n w^{-n}, n = 0 .. support+2
  std::vector<std::vector<Complex>> tilde;   // A(n,m) w^{m-n}, m = n+1 .. support+1
  int top;                                   // support + 2
};

TildeProblem build_problem(const Perturbation& pert, const BorgData& borg,
                           const Background& bg, Complex lambda) {
  borg.validate();
  pert.validate();
  require_admissible(borg, lambda);
  TildeProblem p;
  p.ev = evaluate(borg, bg, lambda);
  p.top = pert.support + 2;
  p.chi.resize(static_cast<std::size_t>(p.top) + 1);
  for (int n = 0; n <= p.top; ++n)
    p.chi[static_cast<std::size_t>(n)] = (n % 2 == 0) ? Complex{1.0, 0.0} : p.ev.chi1.value;
  p.tilde.resize(static_cast<std::size_t>(pert.support) + 1);
  for (int n = 0; n <= pert.support; ++n) {
    auto& row = p.tilde[static_cast<std::size_t>(n)];
    row.resize(static_cast<std::size_t>(pert.support + 1 - n));
    for (int m = n + 1; m <= pert.support + 1; ++m)
      row[static_cast<std::size_t>(m - n - 1)] = kernel_A_tilde(pert, p.ev, bg, n, m);
  }
  return p;
}

// Assemble v from the tilde-space solution and measure the residual of the
// perturbed recurrence.
void finalize(const Perturbation& pert, const Background& bg, const TildeProblem& p,
              const std::vector<Complex>& vt, JostSolution& out) {
  const int top = p.top;
  out.lambda = p.ev.lambda;
  out.v.resize(static_cast<std::size_t>(top) + 1);
  out.V.resize(static_cast<std::size_t>(top) + 1);
  Complex wn{1.0, 0.0};
  for (int n = 0; n <= top; ++n) {
    out.V[static_cast<std::size_t>(n)] = vt[static_cast<std::size_t>(n)] - p.chi[static_cast<std::size_t>(n)];
    out.v[static_cast<std::size_t>(n)] = vt[static_cast<std::size_t>(n)] * wn;
    wn *= p.ev.w;
  }
  for (const Complex& x : out.v)
    if (std::abs(x) > 1e12) out.conditioning_warning = true;

  const Complex lambda = p.ev.lambda;
  double worst = 0.0;
  for (int n = 1; n < top; ++n) {
    const Complex an = pert.entry_a(n, bg);
    const Complex cn = pert.entry_c(n, bg);
    const Complex bn = pert.entry_b(n, bg);
    const Complex lhs = bg.a(n - 1) * out.v[static_cast<std::size_t>(n - 1)] +
                        bn * out.v[static_cast<std::size_t>(n)] +
                        (cn * an / bg.a(n)) * out.v[static_cast<std::size_t>(n + 1)] -
                        lambda * out.v[static_cast<std::size_t>(n)];
    const double scale = (1.0 + std::abs(lambda)) *
                         std::max({1.0, std::abs(out.v[static_cast<std::size_t>(n - 1)]),
                                   std::abs(out.v[static_cast<std::size_t>(n)]),
                                   std::abs(out.v[static_cast<std::size_t>(n + 1)])});
    worst = std::max(worst, std::abs(lhs) / scale);
  }
  out.recurrence_residual = worst;
}

}  // namespace

JostSolution solve_backsub(const Perturbation& pert, const BorgData& borg,
                           const Background& bg, Complex lambda) {
  const TildeProblem p = build_problem(pert, borg, bg, lambda);
  std::vector<Complex> vt = p.chi;
  for (int n = pert.support; n >= 0; --n) {
    Complex acc = p.chi[static_cast<std::size_t>(n)];
    const auto& row = p.tilde[static_cast<std::size_t>(n)];
    for (int m = n + 1; m <= pert.support + 1; ++m)
      acc += row[static_cast<std::size_t>(m - n - 1)] * vt[static_cast<std::size_t>(m)];
    vt[static_cast<std::size_t>(n)] = acc;
  }
  JostSolution out;
  finalize(pert, bg, p, vt, out);
  return out;
}

JostSolution solve_series(const Perturbation& pert, const BorgData& borg,
                          const Background& bg, Complex lambda, double tol, int j_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_series: tol must be positive");
  if (j_max < 1) throw std::invalid_argument("solve_series: j_max must be >= 1");
  const TildeProblem p = build_problem(pert, borg, bg, lambda);
  const int M = pert.support;

  // term_j holds V_{n,j}; V_{n,1} feeds on chi, later terms on each other.
  std::vector<Complex> sum(static_cast<std::size_t>(M) + 1, Complex{0.0, 0.0});
  std::vector<Complex> term(static_cast<std::size_t>(M) + 1);
  for (int n = 0; n <= M; ++n) {
    Complex acc{0.0, 0.0};
    const auto& row = p.tilde[static_cast<std::size_t>(n)];
    for (int m = n + 1; m <= M + 1; ++m)
      acc += row[static_cast<std::size_t>(m - n - 1)] * p.chi[static_cast<std::size_t>(m)];
    term[static_cast<std::size_t>(n)] = acc;
  }

  int terms = 0;
  bool converged = false;
  for (int j = 1; j <= j_max; ++j) {
    terms = j;
    double biggest = 0.0;
    for (int n = 0; n <= M; ++n) {
      sum[static_cast<std::size_t>(n)] += term[static_cast<std::size_t>(n)];
      biggest = std::max(biggest, std::abs(term[static_cast<std::size_t>(n)]));
    }
    if (biggest < tol) {
      converged = true;
      break;
    }
    std::vector<Complex> next(static_cast<std::size_t>(M) + 1, Complex{0.0, 0.0});
    for (int n = 0; n <= M; ++n) {
      Complex acc{0.0, 0.0};
      const auto& row = p.tilde[static_cast<std::size_t>(n)];
      for (int m = n + 1; m <= M; ++m)
        acc += row[static_cast<std::size_t>(m - n - 1)] * term[static_cast<std::size_t>(m)];
      next[static_cast<std::size_t>(n)] = acc;
    }
    term.swap(next);
  }

  std::vector<Complex> vt = p.chi;
  for (int n = 0; n <= M; ++n)
    vt[static_cast<std::size_t>(n)] = p.chi[static_cast<std::size_t>(n)] + sum[static_cast<std::size_t>(n)];
  JostSolution out;
  finalize(pert, bg, p, vt, out);
  out.series_terms_used = terms;
  out.converged = converged;
  return out;
}

Complex jost_value(const Perturbation& pert, const BorgData& borg, const Background& bg,
                   Complex lambda) {
  return solve_backsub(pert, borg, bg, lambda).v[0];
}

}  // namespace jacobi2p
