#pragma once

#include <string_view>
#include <vector>

#include "thinspec/problem.hpp"

namespace thinspec {

enum class Verdict { kAssumed, kPass, kFail };
std::string_view to_string(Verdict v);

struct HypothesisSample {
  double x1 = 0.0;
  double lambda_min = 0.0;  // smallest eigenvalue of a(x1, .) over the grid
  double rho_min = 0.0;
  double rho_max = 0.0;
  double average = 0.0;     // integral of rho(x1, .) over the cell
  bool sign_change = false;
};

struct HypothesisReport {
  double lambda_est = 0.0;
  double periodicity_defect = 0.0;
  std::vector<HypothesisSample> samples;
  // H1 regularity, H2 periodicity, H3 ellipticity, H4 sign change,
  // H5 negative average.
  Verdict h1 = Verdict::kAssumed;
  Verdict h2 = Verdict::kFail;
  Verdict h3 = Verdict::kFail;
  Verdict h4 = Verdict::kFail;
  Verdict h5 = Verdict::kFail;

  bool all_pass() const {
    return h2 == Verdict::kPass && h3 == Verdict::kPass && h4 == Verdict::kPass &&
           h5 == Verdict::kPass;
  }
};

inline constexpr double kPeriodicityTolerance = 1e-12;

// Samples the coefficients on an n x n midpoint grid of the cell for every
// x1 in `x1_samples` (n >= 32). Periodicity is checked on 64 points of the
// y1 = 0 / y1 = 1 edges. Evaluation failures are rethrown with the sample
// location in the message.
HypothesisReport check_hypotheses(const CoefficientProblem& problem,
                                  const std::vector<double>& x1_samples, int n = 64);

// 17 equispaced points on [-1, 1].
std::vector<double> default_x1_samples();

}  // namespace thinspec
