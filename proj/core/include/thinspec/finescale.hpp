#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinspec/assembly.hpp"
#include "thinspec/cell.hpp"
#include "thinspec/hypotheses.hpp"
#include "thinspec/mesh.hpp"
#include "thinspec/oscillator.hpp"
#include "thinspec/problem.hpp"

namespace thinspec {

// Elements per period in x1 (m1 = 2 * per_period / eps) and across the
// thickness (m2 = max(4, per_period) when left at 0).
struct RodPolicy {
  int per_period = 24;
  int m2 = 0;

  int resolved_m2() const { return m2 > 0 ? m2 : std::max(4, per_period); }

  // Cell grid for the effective model: the smallest multiples of
  // (per_period, m2) with at least kMinCellElements per direction, so every
  // rod node is also a cell node.
  std::pair<int, int> cell_grid() const;
};

inline constexpr int kMinCellElements = 16;

inline constexpr int kMinElementsPerPeriod = 8;

struct RodPencil {
  RodGrid rod;
  int per_period = 0;
  Reduction reduction{1, {}};
  SparseSym a;  // reduced stiffness, SPD
  SparseSym b;  // reduced weighted mass, indefinite
  SparseSym m;  // reduced unweighted mass
};

// Requires eps in (0, 1/4] with 1/eps an even integer. Fewer than
// kMinElementsPerPeriod elements per period raises UnderResolved.
RodPencil assemble_rod(const CoefficientProblem& p, double eps, const RodPolicy& policy);

enum class NormalizationMode { kPaper, kUnit };
// eps^{1/2} eps^{d-1} |Q| with d = 2 and |Q| = 1, or 1.
double normalization_constant(NormalizationMode mode, double eps);

struct SpectrumTable {
  Vec lambda;        // ascending positive eigenvalues
  Mat u;             // full-grid nodal vectors, ||u||^2_{L2} = normalization constant
  Vec residuals;
  int iterations = 0;
  double shift = 0.0;
  std::vector<int> clustered;  // j (0-based) with lambda_{j+1} - lambda_j < 1e-6 lambda_j
};

struct SpectrumOptions {
  int k = 2;
  double sigma = 0.0;
  double tol = 1e-10;
  NormalizationMode normalization = NormalizationMode::kPaper;
};

SpectrumTable positive_spectrum(const RodPencil& rod, const SpectrumOptions& opt);

OscillatorSpec oscillator_spec(const EffectiveModel& model);

// mu(0) / eps^2 + nu_j / eps.
double predicted(const EffectiveModel& model, const OscillatorSpec& spec, double eps, int j);

struct FactorizationError {
  double relative = 0.0;  // ||u - c R|| / ||u||
  double scaled = 0.0;    // eps^{-1/2} ||u - c R||
  double fit = 0.0;       // least-squares constant c
};

// Nodal interpolant of R = Psi(0, x/eps) v_j(x1 / sqrt(eps)) on the full rod
// grid, v_j the unit-norm oscillator eigenfunction and Psi interpolated
// bilinearly from the model's cell grid (exact when the grids match).
Vec reference_profile(const RodPencil& rod, const EffectiveModel& model, const OscillatorSpec& spec, int j);

// L2 distance between u (full-grid nodal) and its least-squares multiple of
// reference_profile.
FactorizationError factorization_error(const RodPencil& rod, const Vec& u, const EffectiveModel& model,
                                       const OscillatorSpec& spec, int j);

// (W, mass fraction of u^2 within |x1| <= W) for W in sqrt(eps) * {1, 2, 4, 6},
// 0.5 and 1, sorted by W.
std::vector<std::pair<double, double>> localization_profile(const RodPencil& rod, const Vec& u);

// (u^T B_w u - u^T B_avg u) / (eps ||u|| ||grad u||) where B_avg uses the
// cell average of w(x1, .). An empty weight means rho.
using CoefficientFn = std::function<double(double x1, double y1, double y2)>;
double averaging_diagnostic(const RodPencil& rod, const Vec& u, const CoefficientProblem& p,
                            const CoefficientFn& w = {});

struct SweepOptions {
  std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  int j_max = 2;
  RodPolicy policy;
  NormalizationMode normalization = NormalizationMode::kPaper;
  // Shift the rod pencil by shift_fraction * mu(0) / eps^2 (0 disables).
  double shift_fraction = 0.9;
  double tol = 1e-10;
  bool negative_probe = true;
  EffectiveOptions effective;  // n1, n2 are overridden by the matched grid
  std::string dump_mm_dir;     // write rod matrices when nonempty
};

struct EpsilonRow {
  double eps = 0.0;
  int m1 = 0;
  int m2 = 0;
  int dofs = 0;
  std::vector<double> lambda;
  std::vector<double> predicted;
  std::vector<double> leading_error;  // eps^2 lambda - mu0
  std::vector<double> first_error;    // eps (lambda - mu0 / eps^2) - nu_j
  std::vector<double> residuals;
  std::vector<FactorizationError> factorization;
  std::vector<int> clustered;
  std::vector<std::pair<double, double>> localization;  // j = 1
  double averaging = 0.0;                               // j = 1
  std::optional<double> negative_eigenvalue;
  double shift = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string problem;
  HypothesisReport hypotheses;
  EffectiveModel model;
  OscillatorSpec spec;
  std::vector<double> nu;
  RodPolicy policy;
  NormalizationMode normalization = NormalizationMode::kPaper;
  bool factorization_skipped = false;  // tensor a: reference product not used
  std::vector<EpsilonRow> rows;        // eps strictly decreasing
};

// Hypothesis check, effective model on the matched cell grid, then one
// rod solve per eps (independent jobs). Stage failures are rethrown with a
// stage label; H3-H5 failures raise HypothesisViolated.
ConvergenceReport sweep(const CoefficientProblem& p, const SweepOptions& opt);

// Parses "1/8", "0.125", ... and checks 1/eps is an even integer.
double parse_eps(const std::string& text);

}  // namespace thinspec
