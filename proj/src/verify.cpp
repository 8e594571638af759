#include "jacobi2p/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "jacobi2p/random.hpp"

namespace jacobi2p {

double oracle_filter_margin(const Background& bg) {
  return 0.05 * (bg.band_d() - bg.band_s());
}

namespace {

double dist_to_segment(Complex z, double lo, double hi) {
  const double x = std::clamp(z.real(), lo, hi);
  return std::hypot(z.real() - x, z.imag());
}

double dist_to_bands(const Background& bg, Complex z) {
  const double s = bg.band_s(), d = bg.band_d();
  return std::min(dist_to_segment(z, -d, -s), dist_to_segment(z, s, d));
}

}  // namespace

std::vector<Complex> truncated_section_eigenvalues(const Perturbation& pert,
                                                   const Background& bg, int truncation) {
  if (truncation < 1)
    throw std::invalid_argument("truncated_section_eigenvalues: truncation must be >= 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(truncation, truncation);
  for (int i = 0; i < truncation; ++i) {
    m(i, i) = pert.entry_b(i + 1, bg);
    if (i + 1 < truncation) {
      m(i + 1, i) = pert.entry_a(i + 1, bg);
      m(i, i + 1) = pert.entry_c(i + 1, bg);
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("truncated_eigs: eigenvalue iteration failed at size " +
                           std::to_string(truncation));
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

OracleResult truncated_eigs(const Perturbation& pert, const Background& bg, int truncation) {
  pert.validate();
  bg.validate();
  if (truncation < pert.support + 20)
    throw std::invalid_argument("truncated_eigs: truncation must be >= support + 20");
  OracleResult r;
  r.truncation = truncation;
  r.eigenvalues = truncated_section_eigenvalues(pert, bg, truncation);
  const std::vector<Complex> doubled =
      truncated_section_eigenvalues(pert, bg, 2 * truncation);
  const double margin = oracle_filter_margin(bg);
  r.stable.resize(r.eigenvalues.size());
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& mu : doubled) best = std::min(best, std::abs(r.eigenvalues[i] - mu));
    r.stable[i] = best <= kStabilityTol;
    if (r.stable[i] && dist_to_bands(bg, r.eigenvalues[i]) > margin)
      r.filtered.push_back(r.eigenvalues[i]);
  }
  return r;
}

ContourSpec ContourSpec::circle(Complex center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ContourSpec: radius must be positive");
  ContourSpec c;
  c.kind = Kind::Circle;
  c.center = center;
  c.radius = radius;
  return c;
}

ContourSpec ContourSpec::rect(Complex lo, Complex hi) {
  if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()))
    throw std::invalid_argument("ContourSpec: need lo < hi componentwise");
  ContourSpec c;
  c.kind = Kind::Rect;
  c.lo = lo;
  c.hi = hi;
  return c;
}

Complex ContourSpec::at(double t) const {
  t -= std::floor(t);
  if (kind == Kind::Circle) {
    const double ang = 2.0 * M_PI * t;
    return center + radius * Complex(std::cos(ang), std::sin(ang));
  }
  const double w = hi.real() - lo.real();
  const double h = hi.imag() - lo.imag();
  const double u = 4.0 * t;
  if (u < 1.0) return {lo.real() + w * u, lo.imag()};
  if (u < 2.0) return {hi.real(), lo.imag() + h * (u - 1.0)};
  if (u < 3.0) return {hi.real() - w * (u - 2.0), hi.imag()};
  return {lo.real(), hi.imag() - h * (u - 3.0)};
}

namespace {

constexpr double kContourMargin = 1e-3;

struct ContourTracker {
  const Perturbation& pert;
  const BorgData& borg;
  const Background& bg;
  const ContourSpec& contour;
  double min_mod = std::numeric_limits<double>::infinity();
  double max_mod = 0.0;
  long evals = 0;

  double clearance(Complex z) const {
    double c = borg.dist_continuous_spectrum(z);
    if (borg.weyl_pole_at_nu())
      c = std::min(c, std::abs(z - Complex(borg.nu, 0.0)));
    return c;
  }

  Complex value_at(double t) {
    const Complex z = contour.at(t);
    if (borg.dist_continuous_spectrum(z) < kContourMargin)
      throw std::invalid_argument("winding: contour too close to the continuous spectrum");
    if (borg.weyl_pole_at_nu() && std::abs(z - Complex(borg.nu, 0.0)) < kContourMargin)
      throw std::invalid_argument("winding: contour too close to the Weyl pole");
    const Complex v = jost_value(pert, borg, bg, z);
    const double a = std::abs(v);
    min_mod = std::min(min_mod, a);
    max_mod = std::max(max_mod, a);
    ++evals;
    if (a == 0.0) throw ConvergenceError("winding: contour passes through a zero");
    return v;
  }

  // Total argument increment over [t0, t1].  A step is accepted only when
  // it turns by less than pi/2 AND its chord is short against the local
  // clearance from the spectrum: near the bands the phase of v_0 rotates at
  // a rate set by the w-powers (up to support + 2 of them), and a chord
  // comparable to the clearance can alias a near-2pi turn into a small one.
  double arg_sweep(double t0, double t1, Complex z0, Complex z1, Complex v0, Complex v1,
                   int depth) {
    const double chord = std::abs(z1 - z0);
    const double safe_chord =
        std::min(clearance(z0), clearance(z1)) / static_cast<double>(pert.support + 3);
    const double step = std::arg(v1 / v0);
    if (std::abs(step) < M_PI / 2.0 && chord <= safe_chord) return step;
    if (depth >= 48)
      throw ConvergenceError("winding: argument step failed to resolve (zero on contour?)");
    const double tm = 0.5 * (t0 + t1);
    const Complex zm = contour.at(tm);
    const Complex vm = value_at(tm);
    return arg_sweep(t0, tm, z0, zm, v0, vm, depth + 1) +
           arg_sweep(tm, t1, zm, z1, vm, v1, depth + 1);
  }
};

}  // namespace

WindingResult winding(const Perturbation& pert, const BorgData& borg, const Background& bg,
                      const ContourSpec& contour, int n_samples) {
  const int n = std::max(16, n_samples);
  ContourTracker tracker{pert, borg, bg, contour};
  std::vector<Complex> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    vals[static_cast<std::size_t>(i)] = tracker.value_at(static_cast<double>(i) / n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) / n;
    const double t1 = static_cast<double>(i + 1) / n;
    total += tracker.arg_sweep(t0, t1, contour.at(t0), contour.at(t1),
                               vals[static_cast<std::size_t>(i)],
                               vals[static_cast<std::size_t>((i + 1) % n)], 0);
  }
  const double scale = 1.0 + tracker.max_mod;
  if (tracker.min_mod < 1e-9 * scale)
    throw ConvergenceError("winding: minimum modulus on contour below 1e-9 * scale");
  const double turns = total / (2.0 * M_PI);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) >= 0.1)
    throw ConvergenceError("winding: non-integral winding number " + std::to_string(turns));
  WindingResult res;
  res.contour = contour;
  res.zeros_inside = static_cast<int>(rounded);
  res.min_modulus_on_contour = tracker.min_mod;
  return res;
}

std::optional<Complex> refine_zero(const Perturbation& pert, const BorgData& borg,
                                   const Background& bg, Complex guess) {
  auto value = [&](Complex z) -> std::optional<Complex> {
    try {
      return jost_value(pert, borg, bg, z);
    } catch (const NearSingularError&) {
      return std::nullopt;
    }
  };
  Complex z0 = guess;
  Complex z1 = guess + 1e-7 * (1.0 + std::abs(guess)) * Complex(1.0, 0.7);
  auto f0 = value(z0), f1 = value(z1);
  if (!f0 || !f1) return std::nullopt;
  for (int it = 0; it < 80; ++it) {
    const Complex denom = *f1 - *f0;
    if (denom == Complex{0.0, 0.0}) break;
    const Complex dz = -*f1 * (z1 - z0) / denom;
    const Complex z2 = z1 + dz;
    if (!(std::abs(dz) < 1.0 + std::abs(z1))) return std::nullopt;  // diverging
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = value(z1);
    if (!f1) return std::nullopt;
    if (std::abs(dz) <= 1e-13 * (1.0 + std::abs(z1))) break;
  }
  if (std::abs(*f1) > 1e-6) return std::nullopt;
  return z1;
}

namespace {

std::vector<Complex> locate_impl(const Perturbation& pert, const BorgData& borg,
                                 const Background& bg, Complex lo, Complex hi, int depth) {
  const int count =
      winding(pert, borg, bg, ContourSpec::rect(lo, hi), 64).zeros_inside;
  if (count == 0) return {};
  const double width = hi.real() - lo.real();
  const double height = hi.imag() - lo.imag();
  if (std::max(width, height) < 1e-6) {
    const Complex center = 0.5 * (lo + hi);
    const auto z = refine_zero(pert, borg, bg, center);
    return std::vector<Complex>(static_cast<std::size_t>(count), z ? *z : center);
  }
  if (depth >= 64) throw ConvergenceError("locate_zeros: subdivision depth exceeded");
  const bool split_x = width >= height;
  for (double frac : {0.5, 0.55, 0.45, 0.6, 0.4}) {
    Complex mid_hi = hi, mid_lo = lo;
    if (split_x) {
      const double cut = lo.real() + frac * width;
      mid_hi = {cut, hi.imag()};
      mid_lo = {cut, lo.imag()};
    } else {
      const double cut = lo.imag() + frac * height;
      mid_hi = {hi.real(), cut};
      mid_lo = {lo.real(), cut};
    }
    try {
      std::vector<Complex> zs = locate_impl(pert, borg, bg, lo, mid_hi, depth + 1);
      std::vector<Complex> right = locate_impl(pert, borg, bg, mid_lo, hi, depth + 1);
      zs.insert(zs.end(), right.begin(), right.end());
      return zs;
    } catch (const ConvergenceError&) {
      // zero too close to the cut line; retry with a shifted cut
    }
  }
  throw ConvergenceError("locate_zeros: could not find a clean split line");
}

}  // namespace

std::vector<Complex> locate_zeros_box(const Perturbation& pert, const BorgData& borg,
                                      const Background& bg, Complex lo, Complex hi) {
  return locate_impl(pert, borg, bg, lo, hi, 0);
}

double spectral_radius_bound(const Perturbation& pert, const Background& bg) {
  double row = 0.0, col = 0.0;
  for (int n = 1; n <= pert.support + 4; ++n) {
    double r = std::abs(pert.entry_b(n, bg)) + std::abs(pert.entry_c(n, bg));
    double c = std::abs(pert.entry_b(n, bg)) + std::abs(pert.entry_a(n, bg));
    if (n > 1) {
      r += std::abs(pert.entry_a(n - 1, bg));
      c += std::abs(pert.entry_c(n - 1, bg));
    }
    row = std::max(row, r);
    col = std::max(col, c);
  }
  return std::sqrt(row * col);
}

std::vector<Complex> locate_all_zeros(const Perturbation& pert, const BorgData& borg,
                                      const Background& bg, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("locate_all_zeros: margin must be > 0");
  const double R = std::max(spectral_radius_bound(pert, bg), borg.d) + 1.0;
  const double h = margin / std::sqrt(2.0);
  std::vector<std::pair<Complex, Complex>> tiles;
  tiles.emplace_back(Complex{-R, h}, Complex{R, R});    // above the real strip
  tiles.emplace_back(Complex{-R, -R}, Complex{R, -h});  // below
  auto strip = [&](double x0, double x1) {
    if (x1 - x0 > 1e-9) tiles.emplace_back(Complex{x0, -h}, Complex{x1, h});
  };
  strip(-R, -borg.d - h);
  strip(borg.d + h, R);
  if (borg.weyl_pole_at_nu()) {
    const double hn = std::max(h, 2.0 * kContourMargin);
    strip(-borg.s + h, borg.nu - hn);
    strip(borg.nu + hn, borg.s - h);
  } else {
    strip(-borg.s + h, borg.s - h);
  }
  std::vector<Complex> zeros;
  for (const auto& [lo, hi] : tiles) {
    std::vector<Complex> zs = locate_zeros_box(pert, borg, bg, lo, hi);
    zeros.insert(zeros.end(), zs.begin(), zs.end());
  }
  std::sort(zeros.begin(), zeros.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return zeros;
}

BorgData random_borg(Rng& rng) {
  BorgData b;
  b.s = rng.uniform(0.4, 2.5);
  b.d = b.s * rng.uniform(1.3, 3.5);
  b.nu = (rng.flip() ? 1.0 : -1.0) * rng.uniform(0.005, 0.95) * b.s;
  b.eps = rng.flip() ? +1 : -1;
  return b;
}

Perturbation random_perturbation(Rng& rng, const Background& bg, int max_support,
                                 double scale) {
  if (max_support < 1)
    throw std::invalid_argument("random_perturbation: max_support must be >= 1");
  Perturbation p;
  p.support = 1 + rng.index(max_support);
  for (int k = 1; k <= p.support; ++k) {
    const double a0 = bg.a(k);
    Complex b_dev = rng.in_disk(scale);
    Complex prod_dev = rng.in_disk(0.5 * scale);
    if (rng.index(4) == 0) b_dev = 0.0;
    const double cap = 0.6 * a0;
    if (std::abs(prod_dev) > cap) prod_dev *= cap / std::abs(prod_dev);
    // A common twist of a and c cancels in the a*c product, so the moments
    // see only b_dev and prod_dev.
    const Complex twist = std::polar(rng.uniform(0.6, 1.6), rng.uniform(0.0, 2.0 * M_PI));
    p.b.push_back(bg.b(k) - b_dev);
    p.a.push_back(a0 * twist);
    p.c.push_back((a0 - prod_dev) * a0 / (a0 * twist));
  }
  p.validate();
  return p;
}

Perturbation scale_perturbation(const Perturbation& pert, const Background& bg,
                                double factor) {
  if (!(factor >= 0.0))
    throw std::invalid_argument("scale_perturbation: factor must be >= 0");
  Perturbation out = pert;
  for (int k = 1; k <= pert.support; ++k) {
    const std::size_t i = static_cast<std::size_t>(k - 1);
    const double a0 = bg.a(k);
    const Complex b_dev = bg.b(k) - pert.b[i];
    const Complex prod_dev = a0 - pert.a[i] * pert.c[i] / a0;
    out.b[i] = bg.b(k) - factor * b_dev;
    const Complex scaled_prod = a0 - factor * prod_dev;
    if (std::abs(scaled_prod) < 1e-12 * a0)
      throw std::invalid_argument("scale_perturbation: factor drives a*c to zero");
    out.c[i] = scaled_prod * a0 / out.a[i];
  }
  out.validate();
  return out;
}

bool InvariantReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

}  // namespace jacobi2p
