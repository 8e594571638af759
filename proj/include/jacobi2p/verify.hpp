#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jacobi2p/jost.hpp"
#include "jacobi2p/regions.hpp"

namespace jacobi2p {

/// Finite-section eigenvalue oracle.  `stable` marks eigenvalues unchanged
/// to 1e-6 when the truncation is doubled; `filtered` keeps the stable ones
/// farther than 0.05 (d - s) from the continuous spectrum.
struct OracleResult {
  int truncation = 0;
  std::vector<Complex> eigenvalues;
  std::vector<bool> stable;
  std::vector<Complex> filtered;
};

inline constexpr double kStabilityTol = 1e-6;

/// Margin factor: filtered eigenvalues keep distance 0.05 (d-s) from the bands.
double oracle_filter_margin(const Background& bg);

OracleResult truncated_eigs(const Perturbation& pert, const Background& bg, int truncation);

/// Closed contour for argument-principle counting.
struct ContourSpec {
  enum class Kind { Circle, Rect };
  Kind kind = Kind::Circle;
  Complex center;       // circle
  double radius = 0.0;  // circle
  Complex lo, hi;       // rectangle corners

  static ContourSpec circle(Complex center, double radius);
  static ContourSpec rect(Complex lo, Complex hi);

  /// Point at parameter time t in [0, 1), counterclockwise.
  Complex at(double t) const;
};

struct WindingResult {
  ContourSpec contour;
  int zeros_inside = 0;
  double min_modulus_on_contour = 0.0;
};

/// Number of zeros of the Jost function inside the contour, by adaptive
/// argument tracking (per-step argument change below pi/2, else the step
/// is split).  The contour must keep at least 1e-3 distance from the
/// continuous spectrum and from the Weyl pole.
WindingResult winding(const Perturbation& pert, const BorgData& borg, const Background& bg,
                      const ContourSpec& contour, int n_samples = 256);

/// Secant refinement of a Jost-function zero from a nearby guess.
std::optional<Complex> refine_zero(const Perturbation& pert, const BorgData& borg,
                                   const Background& bg, Complex guess);

/// All zeros inside an axis-aligned box that stays clear of the continuous
/// spectrum, by recursive winding subdivision plus secant polish.
std::vector<Complex> locate_zeros_box(const Perturbation& pert, const BorgData& borg,
                                      const Background& bg, Complex lo, Complex hi);

/// All zeros of the Jost function over a cover of the spectral enclosure
/// radius, tiled to exclude a `margin`-strip around the continuous spectrum
/// (and around nu when the Weyl function has a pole there).
std::vector<Complex> locate_all_zeros(const Perturbation& pert, const BorgData& borg,
                                      const Background& bg, double margin);

/// Row-sum style bound: every eigenvalue of the perturbed operator (and of
/// each finite section) has modulus below this.
double spectral_radius_bound(const Perturbation& pert, const Background& bg);

/// Deterministic random spectral data (used by the invariant suite and the
/// CLI convenience generator).
BorgData random_borg(class Rng& rng);

/// Random perturbation with support <= max_support whose per-site deviations
/// are of order `scale`.  The a/c entries are twisted by a random common
/// factor that leaves the moments unchanged.
Perturbation random_perturbation(class Rng& rng, const Background& bg, int max_support,
                                 double scale);

/// Scales every deviation (b-shift and a*c product shift) by `factor`;
/// moments scale exactly linearly.
Perturbation scale_perturbation(const Perturbation& pert, const Background& bg,
                                double factor);

struct InvariantCheck {
  std::string id;
  bool passed = true;
  std::string detail;  // counterexample payload on failure
};

struct InvariantReport {
  std::uint64_t seed = 0;
  int n_cases = 0;
  std::vector<InvariantCheck> checks;

  bool all_passed() const;
};

/// Runs every module-level invariant over randomized inputs; n_cases scales
/// the random draws and grid sizes.
InvariantReport run_invariant_suite(std::uint64_t seed, int n_cases, int threads = 1);

std::string to_json(const InvariantReport& report);

/// Raw eigenvalues of the leading truncation x truncation section, sorted
/// by (re, im); no stability analysis.
std::vector<Complex> truncated_section_eigenvalues(const Perturbation& pert,
                                                   const Background& bg, int truncation);

/// Individual invariant checks with explicit sample counts.  Tolerances are
/// pinned here; the suite and the acceptance gate both run these.
namespace checks {

InvariantCheck hill_roundtrip(Rng& rng, int n_lambda);
InvariantCheck band_edge_roots(Rng& rng, int n_cases);
InvariantCheck reconstruction_bounds(Rng& rng, int n_cases);
InvariantCheck floquet_identities(Rng& rng, int n_lambda);
InvariantCheck floquet_modulus(Rng& rng, int n_lambda);
InvariantCheck wronskian(Rng& rng, int n_lambda);
InvariantCheck weyl_product(Rng& rng, int n_lambda);
InvariantCheck weyl_closed_form(Rng& rng, int n_lambda);
InvariantCheck conjugate_symmetry(Rng& rng, int n_lambda);
InvariantCheck psi_recurrence(Rng& rng, int n_lambda);
InvariantCheck green_delta(Rng& rng, int n_lambda);
InvariantCheck chi1_bound(Rng& rng, int n_lambda);
InvariantCheck green_tilde_bound(Rng& rng, int n_lambda);
InvariantCheck kernel_bound(Rng& rng, int n_lambda);
InvariantCheck kernel_first_moment_bound(Rng& rng, int n_lambda);
InvariantCheck moments_product_only(Rng& rng, int n_cases);
InvariantCheck solver_agreement(Rng& rng, int n_pairs);
InvariantCheck integral_equation(Rng& rng, int n_lambda);
InvariantCheck solution_bound(Rng& rng, int n_lambda);
InvariantCheck jost_far_field(Rng& rng, int n_cases);
InvariantCheck jost_contour_mean(Rng& rng, int n_cases);
InvariantCheck omega_root(Rng& rng, int n_cases);
InvariantCheck k2_dual_formula(Rng& rng, int n_cases);
InvariantCheck tau_bound(Rng& rng, int n_cases);
InvariantCheck disk_f_bound(Rng& rng, int n_z);
InvariantCheck disk_g_bound(Rng& rng, int n_z);
InvariantCheck criterion_linearity(Rng& rng, int n_cases);
InvariantCheck oracle_zero_perturbation(Rng& rng, int truncation);
InvariantCheck oracle_jost_cross(Rng& rng, int truncation);
InvariantCheck enclosure_soundness(Rng& rng, int n_perturbations, int truncation);
InvariantCheck count_conservation(Rng& rng, int n_perturbations, int truncation);

}  // namespace checks

}  // namespace jacobi2p
