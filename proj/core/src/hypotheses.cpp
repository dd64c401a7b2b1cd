#include "thinspec/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "thinspec/errors.hpp"

namespace thinspec {
namespace {

double smallest_eigenvalue(const Sym2& a) {
  const double mean = 0.5 * (a.a11 + a.a22);
  const double half_diff = 0.5 * (a.a11 - a.a22);
  return mean - std::hypot(half_diff, a.a12);
}

std::string location(double x1, double y1, double y2) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), " at (x1=%.6g, y1=%.6g, y2=%.6g)", x1, y1, y2);
  return buf;
}

template <class F>
auto eval_at(F&& f, double x1, double y1, double y2) {
  try {
    return f(x1, y1, y2);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + location(x1, y1, y2));
  }
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kAssumed: return "assumed";
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
  }
  return "unknown";
}

std::vector<double> default_x1_samples() {
  std::vector<double> xs;
  for (int i = 0; i <= 16; ++i) xs.push_back(-1.0 + i / 8.0);
  return xs;
}

HypothesisReport check_hypotheses(const CoefficientProblem& problem,
                                  const std::vector<double>& x1_samples, int n) {
  if (n < 32) throw Error(ErrorKind::kInvalidArgument, "hypothesis grid must be at least 32x32");
  if (x1_samples.empty()) throw Error(ErrorKind::kInvalidArgument, "no x1 samples");

  const auto a_at = [&](double x1, double y1, double y2) { return problem.a(x1, y1, y2); };
  const auto rho_at = [&](double x1, double y1, double y2) { return problem.weight(x1, y1, y2); };

  HypothesisReport report;
  report.lambda_est = std::numeric_limits<double>::infinity();
  bool all_sign_change = true;
  bool all_negative = true;

  for (const double x1 : x1_samples) {
    if (!(x1 >= -1.0 && x1 <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "x1 sample outside [-1, 1]");
    }
    HypothesisSample s;
    s.x1 = x1;
    s.lambda_min = std::numeric_limits<double>::infinity();
    s.rho_min = std::numeric_limits<double>::infinity();
    s.rho_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double y2 = (j + 0.5) / n;
      for (int i = 0; i < n; ++i) {
        const double y1 = (i + 0.5) / n;
        const double r = eval_at(rho_at, x1, y1, y2);
        s.rho_min = std::min(s.rho_min, r);
        s.rho_max = std::max(s.rho_max, r);
        sum += r;
        s.lambda_min = std::min(s.lambda_min, smallest_eigenvalue(eval_at(a_at, x1, y1, y2)));
      }
    }
    s.average = sum / (static_cast<double>(n) * n);
    s.sign_change = s.rho_min < 0.0 && s.rho_max > 0.0;
    all_sign_change = all_sign_change && s.sign_change;
    all_negative = all_negative && s.average < 0.0;
    report.lambda_est = std::min(report.lambda_est, s.lambda_min);

    for (int k = 0; k < 64; ++k) {
      const double y2 = k / 63.0;
      const double dr = std::abs(eval_at(rho_at, x1, 0.0, y2) - eval_at(rho_at, x1, 1.0, y2));
      const Sym2 a0 = eval_at(a_at, x1, 0.0, y2);
      const Sym2 a1 = eval_at(a_at, x1, 1.0, y2);
      const double da = std::max({std::abs(a0.a11 - a1.a11), std::abs(a0.a12 - a1.a12),
                                  std::abs(a0.a22 - a1.a22)});
      report.periodicity_defect = std::max({report.periodicity_defect, dr, da});
    }
    report.samples.push_back(s);
  }

  report.h2 = report.periodicity_defect <= kPeriodicityTolerance ? Verdict::kPass : Verdict::kFail;
  report.h3 = report.lambda_est > 0.0 ? Verdict::kPass : Verdict::kFail;
  report.h4 = all_sign_change ? Verdict::kPass : Verdict::kFail;
  report.h5 = all_negative ? Verdict::kPass : Verdict::kFail;
  return report;
}

}  // namespace thinspec
