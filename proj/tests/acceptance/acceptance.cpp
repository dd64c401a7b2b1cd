// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "thinspec/assembly.hpp"
#include "thinspec/cell.hpp"
#include "thinspec/config.hpp"
#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/oscillator.hpp"

using namespace thinspec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.4g", v[i]);
  return s + "]";
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<std::string> kShipped = {"p_const.toml", "p_loc.toml", "p_shift.toml"};

CoefficientProblem shipped(const std::string& file) {
  return load_config(std::string(THINSPEC_PROBLEM_DIR) + "/" + file).problem;
}

// The localizing sweep is shared by several criteria.
struct SweepRun {
  ConvergenceReport report;
  double seconds = 0.0;
};

const SweepRun& loc_sweep() {
  static const SweepRun run = [] {
    const RunConfig cfg = load_config(std::string(THINSPEC_PROBLEM_DIR) + "/p_loc.toml");
    SweepOptions opt = cfg.sweep;
    opt.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    opt.effective = cfg.cell;
    const auto t0 = Clock::now();
    SweepRun r{sweep(cfg.problem, opt), 0.0};
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome principal_vs_dense() {
  const auto t0 = Clock::now();
  const Grid g = make_cell_grid(24, 24);
  const CellOperators ops = assemble_cell(shipped("p_const.toml"), 0.0, g);
  const PrincipalPair pp = principal_positive({ops.a, ops.b, ops.m});
  const double t = seconds_since(t0);
  const double ref = oracle::dense_principal_mu(ops.a, ops.b, ops.m);
  const double e = rel(pp.mu, ref);
  return {e <= 1e-8 && t < 10.0,
          "mu " + fmt("%.12f", pp.mu) + " dense " + fmt("%.12f", ref) + " rel " + fmt("%.2e", e) + ", " +
              fmt("%.2f", t) + " s"};
}

Outcome nonnegative_average() {
  const CoefficientProblem cases[] = {
      make_scalar_problem("pos_avg", "1", "cos(2*pi*y1) + 0.5"),
      make_scalar_problem("layered", "2 + cos(2*pi*y1)", "sin(2*pi*y1) + 0.1*y2"),
      make_tensor_problem("tensor", "2", "0.5*sin(2*pi*y1)", "1 + y2", "cos(2*pi*y1)*(1 + y2) + 0.2"),
  };
  int rejected = 0;
  std::string detail;
  for (const auto& p : cases) {
    try {
      principal_cell_eig(p, 0.0, make_cell_grid(24, 12));
      detail += p.name + ": accepted; ";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoPositivePrincipal) {
        ++rejected;
      } else {
        detail += p.name + ": " + std::string(to_string(e.kind())) + "; ";
      }
    }
  }
  return {rejected == 3, std::to_string(rejected) + "/3 rejected " + detail};
}

Outcome positivity() {
  double worst = INFINITY;
  int pairs = 0;
  std::vector<std::pair<std::string, CoefficientProblem>> problems;
  for (const auto& f : kShipped) problems.emplace_back(f, shipped(f));
  problems.emplace_back("P_OFFSET", builtin_problem("P_OFFSET"));
  const std::pair<int, int> grids[] = {{16, 8}, {16, 16}, {24, 24}, {32, 16}, {64, 64}};
  for (const auto& [label, p] : problems) {
    for (const auto& [n1, n2] : grids) {
      for (double x1 : {-1.0, -0.5, 0.0, 0.25, 1.0}) {
        const CellEigenpair e = principal_cell_eig(p, x1, make_cell_grid(n1, n2));
        worst = std::min(worst, e.psi.minCoeff());
        ++pairs;
      }
    }
  }
  return {worst > 0.0, std::to_string(pairs) + " eigenpairs, min psi " + fmt("%.4g", worst)};
}

Outcome mu_prime_vs_fd() {
  const auto p = shipped("p_loc.toml");
  const Grid g = make_cell_grid(32, 16);
  const double h = 1e-3;
  double worst = 0.0;
  // mu'(0) = 0 by symmetry, so relative errors are taken away from the origin.
  for (double x1 : {-0.9, -0.7, -0.5, -0.3, -0.15, 0.15, 0.3, 0.5, 0.7, 0.9}) {
    const double fd = (principal_cell_eig(p, x1 + h, g).mu - principal_cell_eig(p, x1 - h, g).mu) / (2 * h);
    const double formula = mu_prime(p, principal_cell_eig(p, x1, g), g);
    worst = std::max(worst, rel(formula, fd));
  }
  return {worst <= 1e-3, "10 points, max rel " + fmt("%.2e", worst)};
}

Outcome case1_analytics() {
  const auto rho = "cos(2*pi*y1) - 0.5";
  const double sqrt3 = oracle::harmonic_mean([](double y) { return 2.0 + std::cos(2 * std::numbers::pi * y); });
  const double two = oracle::arithmetic_mean([](double y) { return 2.0 + std::cos(2 * std::numbers::pi * y); });
  const auto layered = corrector_case1(make_scalar_problem("l", "2 + cos(2*pi*y1)", rho), 0.0, make_cell_grid(512, 8));
  const auto transverse =
      corrector_case1(make_scalar_problem("t", "2 + cos(2*pi*y2)", rho), 0.0, make_cell_grid(16, 32));
  const auto constant = corrector_case1(make_scalar_problem("c", "1", rho), 0.0, make_cell_grid(32, 16));
  const double e1 = rel(layered.a_eff, sqrt3);
  const double e2 = std::abs(transverse.a_eff - two);
  const double n0 = constant.n11.values.cwiseAbs().maxCoeff();
  return {e1 <= 1e-5 && e2 <= 1e-6 && n0 <= 1e-12,
          "layered rel " + fmt("%.2e", e1) + " (512x8), transverse abs " + fmt("%.2e", e2) + ", max|N| " +
              fmt("%.1e", n0)};
}

Outcome weighted_structure() {
  bool ok = true;
  std::string detail;
  for (const char* file : {"p_const.toml", "p_loc.toml"}) {
    const auto p = shipped(file);
    for (const auto& [n1, n2] : {std::pair{16, 16}, std::pair{64, 64}}) {
      const Grid g = make_cell_grid(n1, n2);
      const WeightedCorrector w = corrector_weighted(p, g, principal_cell_eig(p, 0.0, g).psi);
      const double a21 = std::abs(w.a_eff_integral(1, 0));
      ok = ok && a21 <= 1e-8 && w.a_eff > 0.0;
      detail += std::string(file) + " " + std::to_string(n1) + "x" + std::to_string(n2) + ": |A21| " +
                fmt("%.1e", a21) + " a_eff " + fmt("%.5f", w.a_eff) + "; ";
    }
  }
  return {ok, detail};
}

Outcome oscillator_cross_validation() {
  const auto t0 = Clock::now();
  std::vector<OscillatorSpec> specs = {OscillatorSpec{}};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> a(0.1, 4.0), mu2(0.5, 400.0), c(0.0, 10.0), rho(0.2, 3.0);
  for (int i = 0; i < 5; ++i) specs.push_back({a(rng), c(rng), mu2(rng), rho(rng)});
  double worst = 0.0;
  for (const auto& s : specs) {
    const TruncatedSolution t = solve_truncated(s, default_truncation(s), 4000, 4);
    for (int j = 1; j <= 4; ++j) worst = std::max(worst, rel(t.nu[j - 1], nu_closed_form(s, j)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 5.0,
          "canonical + 5 random, max rel " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome asymptotic_trend() {
  const SweepRun& s = loc_sweep();
  const double mu0 = s.report.model.mu0;
  std::vector<double> lead, first;
  for (const auto& row : s.report.rows) {
    lead.push_back(std::abs(row.leading_error[0]));
    first.push_back(std::abs(row.first_error[0]));
  }
  const double gap = lead.back() / mu0;
  return {oracle::strictly_decreasing(lead) && oracle::strictly_decreasing(first) && gap <= 0.05 &&
              s.seconds <= 600.0,
          "|eps^2 lambda - mu0| " + list(lead) + ", |first-order| " + list(first) + ", final gap " +
              fmt("%.2e", gap) + ", " + fmt("%.1f", s.seconds) + " s"};
}

Outcome localization() {
  const auto& row = loc_sweep().report.rows.back();
  const double w6 = 6.0 * std::sqrt(row.eps);
  double at6 = -1.0;
  bool monotone = true;
  std::vector<double> fractions;
  for (std::size_t i = 0; i < row.localization.size(); ++i) {
    const auto [w, f] = row.localization[i];
    fractions.push_back(f);
    if (std::abs(w - w6) < 1e-12) at6 = f;
    if (i > 0 && f < row.localization[i - 1].second) monotone = false;
  }
  return {row.eps == 1.0 / 64 && at6 >= 0.95 && monotone,
          "eps 1/64, fraction(6 sqrt eps) " + fmt("%.6f", at6) + ", all " + list(fractions)};
}

Outcome factorization_decay() {
  std::vector<double> scaled;
  for (const auto& row : loc_sweep().report.rows) {
    if (row.factorization.empty()) return {false, "factorization error not computed"};
    scaled.push_back(row.factorization[0].scaled);
  }
  return {oracle::strictly_decreasing(scaled), "scaled j=1 " + list(scaled)};
}

Outcome dense_equivalence() {
  int instances = 0;
  double worst = 0.0;
  std::string detail;
  // Cell pencils: principal root against the dense sweep.
  for (const char* file : {"p_loc.toml", "p_shift.toml"}) {
    const auto p = shipped(file);
    for (const auto& [n1, n2] : {std::pair{16, 8}, std::pair{24, 24}, std::pair{32, 16}}) {
      const CellOperators ops = assemble_cell(p, 0.3, make_cell_grid(n1, n2));
      const double mu = principal_positive({ops.a, ops.b, ops.m}).mu;
      worst = std::max(worst, rel(mu, oracle::dense_principal_mu(ops.a, ops.b, ops.m)));
      ++instances;
    }
  }
  // Cell Laplacian (A, M): lowest six eigenvalues.
  {
    const Grid g = make_cell_grid(24, 24);
    const SparseSym a = assemble_stiffness(g, [](const QuadPoint&) { return Sym2{1.0, 0.0, 1.0}; });
    const SparseSym m = assemble_mass(g);
    const EigResult r = smallest_eigs(a, m, 6);
    const std::vector<double> d = oracle::dense_eigs(a, m);
    for (int j = 1; j < 6; ++j) worst = std::max(worst, rel(r.values[j], d[j]));
    worst = std::max(worst, std::abs(r.values[0] - d[0]) / d[1]);
    ++instances;
  }
  // Rod pencils: positive branch, shifted and unshifted.
  for (const char* file : {"p_loc.toml", "p_shift.toml"}) {
    const auto p = shipped(file);
    for (const auto& [eps, k] : {std::pair{0.25, 8}, std::pair{0.125, 8}, std::pair{0.0625, 8}}) {
      const RodPencil rod = assemble_rod(p, eps, RodPolicy{k, 0});
      if (rod.reduction.reduced_dim() > kDenseLimit) continue;
      const std::vector<double> d = oracle::dense_positive_eigs(rod.a, rod.b);
      for (double frac : {0.0, 0.9}) {
        SpectrumOptions so;
        so.k = 3;
        so.sigma = frac * d[0];
        const SpectrumTable t = positive_spectrum(rod, so);
        for (int j = 0; j < so.k; ++j) worst = std::max(worst, rel(t.lambda[j], d[j]));
        ++instances;
      }
    }
  }
  return {worst <= 1e-8, std::to_string(instances) + " instances, max rel " + fmt("%.2e", worst)};
}

Outcome averaging_bounded() {
  std::vector<double> ratios;
  for (const auto& row : loc_sweep().report.rows) ratios.push_back(row.averaging);
  const double ref = std::abs(ratios.front());
  bool ok = ref > 0.0;
  for (double r : ratios) ok = ok && std::abs(r) <= 10.0 * ref;
  return {ok, "ratios " + list(ratios)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"principal cell eigenvalue vs dense root", principal_vs_dense},
      {"nonnegative average rejected", nonnegative_average},
      {"principal eigenvector positive", positivity},
      {"mu' formula vs finite differences", mu_prime_vs_fd},
      {"case-1 effective coefficient analytics", case1_analytics},
      {"weighted corrector structure", weighted_structure},
      {"oscillator truncated vs closed form", oscillator_cross_validation},
      {"two-term asymptotics trend", asymptotic_trend},
      {"eigenfunction localization", localization},
      {"factorization error decay", factorization_decay},
      {"sparse vs dense eigenvalues", dense_equivalence},
      {"averaging diagnostic bounded", averaging_bounded},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
