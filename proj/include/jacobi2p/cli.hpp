#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jacobi2p/perturbation.hpp"
#include "jacobi2p/regions.hpp"

namespace jacobi2p {

/// Parsed job description.  Complex numbers appear in configs as [re, im]
/// pairs; everything re-validates module invariants on load and serializes
/// back losslessly (17 significant digits).
struct JobConfig {
  std::optional<BorgData> borg;
  std::optional<Perturbation> perturbation;
  std::optional<Complex> lambda;
  std::optional<GridSpec> grid;
  std::optional<double> total0;  // overrides the perturbation-derived moment
  std::optional<double> total1;
  int truncation = 200;
  double tol = 1e-12;
  int j_max = 200;
  std::uint64_t seed = 0;
  int n_cases = 100;
  std::string solver = "backsub";  // or "series"
  int max_support = 6;             // random-pert
  double scale = 0.1;              // random-pert
  std::optional<std::array<double, 4>> raw_edges;  // normalize
  std::optional<double> raw_nu;                    // normalize
  std::optional<int> raw_eps;                      // normalize

  std::string to_json_string() const;
};

JobConfig parse_job_config(const std::string& json_text);

/// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 invariant
/// violation.  args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jacobi2p
