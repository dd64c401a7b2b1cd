#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thinspec/cell.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/problem.hpp"

namespace thinspec {

// Schema (every key optional except [problem] rho and a or a11/a12/a22):
//
//   [problem]  name, description, a | a11 a12 a22, rho      (expression strings)
//   [cell]     grid = [n1, n2], h_mu2, h_psi, aeff_unweighted
//   [rod]      per_period, m2
//   [sweep]    eps = ["1/8", 0.0625, ...], jmax, normalization = "paper" | "unit",
//              shift_fraction
//   [solver]   tol, max_iter
//   [output]   dir, dump_mm
//
// Unknown tables or keys are errors.
struct RunConfig {
  std::string source;  // path the config was read from
  CoefficientProblem problem;
  EffectiveOptions cell;
  SweepOptions sweep;
  std::string output_dir = "report";
  bool dump_mm = false;
};

// Throws Error(kConfig) with "source:line:column: message".
RunConfig parse_config(std::string_view text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

}  // namespace thinspec
