#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "thinspec/cell.hpp"
#include "thinspec/config.hpp"
#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/hypotheses.hpp"
#include "thinspec/oscillator.hpp"
#include "thinspec/parallel.hpp"
#include "thinspec/report.hpp"

namespace thinspec::cli {
namespace {

using nlohmann::json;

// A path to a TOML file, or the name of a shipped problem when no such file exists.
RunConfig load_problem(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_config(arg);
  for (const auto& name : builtin_names()) {
    if (name == arg) {
      RunConfig cfg;
      cfg.source = "builtin:" + name;
      cfg.problem = builtin_problem(name);
      return cfg;
    }
  }
  throw Error(ErrorKind::kConfig, arg + ": no such file or shipped problem");
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t u1 = 0;
    std::size_t u2 = 0;
    const std::string a = text.substr(0, x);
    const std::string b = text.substr(x + 1);
    const int n1 = std::stoi(a, &u1);
    const int n2 = std::stoi(b, &u2);
    if (u1 != a.size() || u2 != b.size() || n1 < 4 || n2 < 2) throw std::invalid_argument(text);
    return {n1, n2};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kInvalidArgument, "grid must look like N1xN2 with N1 >= 4, N2 >= 2, got '" + text + "'");
  }
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_eps(item));
  if (out.empty()) throw Error(ErrorKind::kInvalidArgument, "empty --eps list");
  return out;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int check_cmd(const std::string& problem, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_problem(problem);
  const HypothesisReport r = check_hypotheses(cfg.problem, default_x1_samples());
  json j = report::to_json(r);
  j["problem"] = cfg.problem.name;
  j["source"] = cfg.source;
  print_json(out, j);
  if (!r.all_pass()) {
    err << "hypothesis check failed for " << cfg.problem.name << '\n';
    return kHypothesis;
  }
  return kOk;
}

int cell_cmd(const std::string& problem, double x1, const std::string& grid, std::ostream& out) {
  const RunConfig cfg = load_problem(problem);
  const auto [n1, n2] = parse_grid(grid);
  const Grid g = make_cell_grid(n1, n2);
  const CellEigenpair e = principal_cell_eig(cfg.problem, x1, g, cfg.cell.principal);
  json j = report::to_json(e);
  j["grid"] = {n1, n2};
  j["min_psi"] = e.psi.minCoeff();
  print_json(out, j);
  return kOk;
}

int effective_cmd(const std::string& problem, bool unweighted, const std::string& grid, std::ostream& out) {
  const RunConfig cfg = load_problem(problem);
  EffectiveOptions opt = cfg.cell;
  if (unweighted) opt.aeff_unweighted = true;
  if (!grid.empty()) std::tie(opt.n1, opt.n2) = parse_grid(grid);
  const EffectiveModel m = build_effective_model(cfg.problem, opt);
  json j = report::to_json(m);
  j["problem"] = cfg.problem.name;
  print_json(out, j);
  return kOk;
}

int oscillator_cmd(const std::string& model, int k, bool numeric, std::ostream& out) {
  std::ifstream in(model);
  if (!in) throw Error(ErrorKind::kConfig, model + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, model + ": " + e.what());
  }
  if (k < 1 || k > kMaxHermiteIndex) {
    throw Error(ErrorKind::kInvalidArgument, "--k must be in [1, " + std::to_string(kMaxHermiteIndex) + "]");
  }
  const OscillatorSpec s = report::spec_from_json(j);
  if (numeric) {
    const TruncatedSolution t = solve_truncated(s, default_truncation(s), 4000, k);
    report::write_csv(out, report::oscillator_table(s, k, &t));
  } else {
    report::write_csv(out, report::oscillator_table(s, k));
  }
  return kOk;
}

struct SweepArgs {
  std::string problem;
  std::string eps;
  int jmax = 0;
  std::string out_dir;
  bool dump_mm = false;
  int per_period = 0;
  std::string normalization;
  bool aeff_unweighted = false;
};

int sweep_cmd(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_problem(a.problem);
  if (!a.eps.empty()) cfg.sweep.eps = parse_eps_list(a.eps);
  if (a.jmax > 0) cfg.sweep.j_max = a.jmax;
  if (!a.out_dir.empty()) cfg.output_dir = a.out_dir;
  if (a.dump_mm) cfg.dump_mm = true;
  if (a.per_period > 0) cfg.sweep.policy.per_period = a.per_period;
  if (a.aeff_unweighted) cfg.cell.aeff_unweighted = true;
  if (a.normalization == "unit") {
    cfg.sweep.normalization = NormalizationMode::kUnit;
  } else if (a.normalization == "paper") {
    cfg.sweep.normalization = NormalizationMode::kPaper;
  } else if (!a.normalization.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "--normalization must be paper or unit");
  }
  cfg.sweep.effective = cfg.cell;
  if (cfg.dump_mm) cfg.sweep.dump_mm_dir = cfg.output_dir + "/matrices";

  err << "sweep " << cfg.problem.name << ": " << cfg.sweep.eps.size() << " eps values, "
      << worker_count() << " worker(s)\n";
  const ConvergenceReport r = sweep(cfg.problem, cfg.sweep);
  report::write_sweep(r, cfg.output_dir);
  report::write_csv(out, report::sweep_tables(r).at("eigenvalues"));
  err << "wrote " << cfg.output_dir << "/report.json and tables\n";
  return kOk;
}

int oracle_cmd(const std::string& problem, const std::string& eps_text, int per_period, int k,
               std::ostream& out) {
  const RunConfig cfg = load_problem(problem);
  const double eps = parse_eps(eps_text);
  RodPolicy policy = cfg.sweep.policy;
  policy.per_period = per_period;
  const RodPencil rod = assemble_rod(cfg.problem, eps, policy);
  if (rod.reduction.reduced_dim() > kDenseLimit) {
    throw Error(ErrorKind::kSizeExceeded, "rod has " + std::to_string(rod.reduction.reduced_dim()) +
                                              " unknowns; the dense oracle handles at most " +
                                              std::to_string(kDenseLimit));
  }
  PositiveOptions po;
  po.k = k;
  const EigResult sparse = positive_pencil_spectrum(rod.a, rod.b, po);
  const Vec dense = dense_positive_branch(rod.a, rod.b);
  if (dense.size() < k) throw Error(ErrorKind::kPartialSpectrum, "dense oracle found too few positive eigenvalues");
  json rows = json::array();
  double worst = 0.0;
  for (int j = 0; j < k; ++j) {
    const double rel = std::abs(sparse.values[j] - dense[j]) / std::abs(dense[j]);
    worst = std::max(worst, rel);
    rows.push_back({{"j", j + 1}, {"sparse", sparse.values[j]}, {"dense", dense[j]}, {"rel_diff", rel}});
  }
  print_json(out, {{"problem", cfg.problem.name},
                   {"eps", eps},
                   {"dofs", rod.reduction.reduced_dim()},
                   {"eigenvalues", rows},
                   {"max_rel_diff", worst}});
  return worst <= 1e-8 ? kOk : kFailure;
}

void diagnose(const Error& e, std::ostream& err) {
  json j = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (const auto* h6 = dynamic_cast<const H6ViolatedError*>(&e)) {
    json scan = json::array();
    for (const auto& s : h6->scan()) scan.push_back({{"x1", s.x1}, {"mu", s.mu}});
    j["scan"] = scan;
    j["mu2"] = h6->mu2();
  } else if (const auto* u = dynamic_cast<const UnderResolvedError*>(&e)) {
    j["required_m1"] = u->required_m1();
  } else if (const auto* nc = dynamic_cast<const NotConvergedError*>(&e)) {
    j["best_residual"] = nc->best_residual();
  } else if (const auto* ps = dynamic_cast<const PartialSpectrumError*>(&e)) {
    j["found"] = ps->found();
  }
  err << j.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral asymptotics of thin periodic rods with sign-changing weight", "thinspec"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (overrides THINSPEC_WORKERS)")->check(CLI::PositiveNumber);

  std::string problem;
  auto* check = app.add_subcommand("check", "Check the standing hypotheses on the coefficients");
  check->add_option("--problem", problem, "Problem TOML file or shipped problem name")->required();

  double x1 = 0.0;
  std::string grid = "64x64";
  auto* cell = app.add_subcommand("cell", "Principal cell eigenpair at one x1");
  cell->add_option("--problem", problem)->required();
  cell->add_option("--x1", x1, "Slow variable")->check(CLI::Range(-1.0, 1.0));
  cell->add_option("--grid", grid, "Cell grid N1xN2");

  bool unweighted = false;
  std::string eff_grid;
  auto* effective = app.add_subcommand("effective", "Effective one-dimensional model");
  effective->add_option("--problem", problem)->required();
  effective->add_flag("--aeff-unweighted", unweighted, "Use a_eff without the Psi^2 weight");
  effective->add_option("--grid", eff_grid, "Cell grid N1xN2 (default from the config)");

  std::string model;
  int k = 4;
  bool numeric = false;
  auto* oscillator = app.add_subcommand("oscillator", "Harmonic-oscillator eigenvalues as CSV");
  oscillator->add_option("--model", model, "EffectiveModel or OscillatorSpec JSON")->required();
  oscillator->add_option("--k", k, "Number of eigenvalues");
  oscillator->add_flag("--numeric", numeric, "Add the truncated finite-element values");

  SweepArgs sa;
  auto* sweep_app = app.add_subcommand("sweep", "Fine-scale eigenvalue sweep over eps");
  sweep_app->add_option("--problem", sa.problem)->required();
  sweep_app->add_option("--eps", sa.eps, "Comma-separated list, e.g. 1/8,1/16");
  sweep_app->add_option("--jmax", sa.jmax, "Eigenvalues per eps");
  sweep_app->add_option("--out", sa.out_dir, "Output directory");
  sweep_app->add_flag("--dump-mm", sa.dump_mm, "Write rod matrices in Matrix Market format");
  sweep_app->add_option("--per-period", sa.per_period, "Rod elements per period in x1");
  sweep_app->add_option("--normalization", sa.normalization, "paper or unit");
  sweep_app->add_flag("--aeff-unweighted", sa.aeff_unweighted, "Use a_eff without the Psi^2 weight");
  sweep_app->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string oracle_eps = "1/4";
  int oracle_pp = 8;
  int oracle_k = 2;
  auto* oracle = app.add_subcommand("oracle", "Compare the sparse rod spectrum with a dense solve");
  oracle->add_option("--problem", problem)->required();
  oracle->add_option("--eps", oracle_eps, "Single eps value");
  oracle->add_option("--per-period", oracle_pp, "Rod elements per period in x1");
  oracle->add_option("--k", oracle_k, "Number of eigenvalues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (workers > 0) set_worker_count(workers);
    if (*check) return check_cmd(problem, out, err);
    if (*cell) return cell_cmd(problem, x1, grid, out);
    if (*effective) return effective_cmd(problem, unweighted, eff_grid, out);
    if (*oscillator) return oscillator_cmd(model, k, numeric, out);
    if (*sweep_app) return sweep_cmd(sa, out, err);
    if (*oracle) return oracle_cmd(problem, oracle_eps, oracle_pp, oracle_k, out);
  } catch (const Error& e) {
    diagnose(e, err);
    return is_hypothesis_failure(e.kind()) ? kHypothesis : kFailure;
  } catch (const std::exception& e) {
    err << json({{"error", "Internal"}, {"message", e.what()}}).dump() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace thinspec::cli
