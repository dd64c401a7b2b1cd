#include "thinspec/finescale.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <tuple>
#include <unordered_map>

#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/parallel.hpp"

namespace thinspec {
namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

long even_reciprocal(double eps) {
  if (!(eps > 0.0 && eps <= 0.25)) {
    throw Error(ErrorKind::kInvalidArgument,
                "eps = " + fmt_g(eps) + " is outside (0, 1/4]");
  }
  const double inv = 1.0 / eps;
  const long r = std::lround(inv);
  if (std::abs(inv - r) > 1e-9 * inv || r % 2 != 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "1/eps must be an even integer so the rod holds whole periods, got eps = " + fmt_g(eps));
  }
  return r;
}

// Bilinear interpolation of a cell-grid nodal field at (y1, y2) in [0,1]^2.
double interpolate_cell(const Grid& cell, const Vec& f, double y1, double y2) {
  const double s = y1 * cell.nx;
  const double t = y2 * cell.ny;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, cell.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(t)), 0, cell.ny - 1);
  const double xi = s - i;
  const double eta = t - j;
  const auto d = cell.element_dofs(i, j);
  return (1 - xi) * (1 - eta) * f[d[0]] + xi * (1 - eta) * f[d[1]] + xi * eta * f[d[2]] +
         (1 - xi) * eta * f[d[3]];
}

std::string eps_label(double eps) { return "1/" + std::to_string(std::lround(1.0 / eps)); }

}  // namespace

std::pair<int, int> RodPolicy::cell_grid() const {
  const auto multiple = [](int n) { return n * ((kMinCellElements + n - 1) / n); };
  return {multiple(per_period), multiple(resolved_m2())};
}

double parse_eps(const std::string& text) {
  double value = 0.0;
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      std::size_t u1 = 0;
      std::size_t u2 = 0;
      const std::string num = text.substr(0, slash);
      const std::string den = text.substr(slash + 1);
      const double a = std::stod(num, &u1);
      const double b = std::stod(den, &u2);
      if (u1 != num.size() || u2 != den.size() || b == 0.0) throw std::invalid_argument(text);
      value = a / b;
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kInvalidArgument, "cannot parse eps value '" + text + "'");
  }
  even_reciprocal(value);
  return value;
}

RodPencil assemble_rod(const CoefficientProblem& p, double eps, const RodPolicy& policy) {
  const long periods_half = even_reciprocal(eps);
  if (policy.per_period < kMinElementsPerPeriod) {
    const int required = static_cast<int>(std::ceil(2.0 * kMinElementsPerPeriod / eps));
    throw UnderResolvedError("rod mesh resolves a period with " + std::to_string(policy.per_period) +
                                 " elements; at least " + std::to_string(kMinElementsPerPeriod) +
                                 " needed (m1 >= " + std::to_string(required) + ")",
                             required);
  }
  const int m2 = policy.resolved_m2();
  if (m2 < 4) throw Error(ErrorKind::kInvalidArgument, "rod needs m2 >= 4 elements across");
  const int m1 = static_cast<int>(2 * policy.per_period * periods_half);

  RodPencil r;
  r.rod = make_rod_grid(eps, m1, m2);
  r.per_period = policy.per_period;
  const CoordinateMap map = rod_coordinates(eps, policy.per_period);
  const Grid& g = r.rod.grid;
  r.reduction = Reduction(g.num_dofs(), r.rod.dirichlet);
  r.a = r.reduction.apply(assemble_stiffness(g, conductivity(p, map)));
  r.b = r.reduction.apply(assemble_mass(g, weight(p, map)));
  r.m = r.reduction.apply(assemble_mass(g));
  return r;
}

double normalization_constant(NormalizationMode mode, double eps) {
  return mode == NormalizationMode::kPaper ? std::sqrt(eps) * eps : 1.0;
}

SpectrumTable positive_spectrum(const RodPencil& rod, const SpectrumOptions& opt) {
  PositiveOptions po;
  po.k = opt.k;
  po.sigma = opt.sigma;
  po.tol = opt.tol;
  const EigResult r = positive_pencil_spectrum(rod.a, rod.b, po);

  SpectrumTable t;
  t.lambda = r.values;
  t.residuals = r.residuals;
  t.iterations = r.iterations;
  t.shift = r.shift;
  const double target = normalization_constant(opt.normalization, rod.rod.eps);
  t.u.resize(rod.reduction.full_dim(), opt.k);
  for (int j = 0; j < opt.k; ++j) {
    Vec v = r.vectors.col(j);
    v *= std::sqrt(target / quad(rod.m, v));
    if ((rod.m * v).sum() < 0.0) v = -v;
    t.u.col(j) = rod.reduction.prolong(v);
    if (j + 1 < opt.k && r.values[j + 1] - r.values[j] < 1e-6 * r.values[j]) t.clustered.push_back(j);
  }
  return t;
}

OscillatorSpec oscillator_spec(const EffectiveModel& model) {
  OscillatorSpec s;
  s.a_eff = model.a_eff;
  s.c_eff = model.c_eff;
  s.mu2 = model.mu2;
  s.rho_avg = model.rho_psi_avg;
  return s;
}

double predicted(const EffectiveModel& model, const OscillatorSpec& spec, double eps, int j) {
  return model.mu0 / (eps * eps) + nu_closed_form(spec, j) / eps;
}

Vec reference_profile(const RodPencil& rod, const EffectiveModel& model, const OscillatorSpec& spec, int j) {
  const Grid cell = make_cell_grid(model.n1, model.n2);
  if (model.psi0.size() != cell.num_dofs()) {
    throw Error(ErrorKind::kInvalidArgument, "reference_profile: model carries no Psi(0, .)");
  }
  const Grid& g = rod.rod.grid;
  const double eps = rod.rod.eps;
  const double root = std::sqrt(eps);
  const int k = rod.per_period;
  Vec r = Vec::Zero(g.num_dofs());
  for (int jy = 0; jy <= g.ny; ++jy) {
    for (int ix = 0; ix < g.nodes_x(); ++ix) {
      // Fast variable taken from the node index so that it is exactly periodic.
      const double y1 = static_cast<double>(ix % k) / k;
      const double y2 = static_cast<double>(jy) / g.ny;
      const double x1 = g.node_x(ix);
      r[g.dof(ix, jy)] = interpolate_cell(cell, model.psi0, y1, y2) * eigenfunction_unit(spec, j, x1 / root);
    }
  }
  for (int d : rod.rod.dirichlet) r[d] = 0.0;
  return r;
}

FactorizationError factorization_error(const RodPencil& rod, const Vec& u, const EffectiveModel& model,
                                       const OscillatorSpec& spec, int j) {
  const Vec r = reference_profile(rod, model, spec, j);
  const SparseSym m = assemble_mass(rod.rod.grid);
  const Vec mr = m * r;
  const double rr = r.dot(mr);
  FactorizationError out;
  out.fit = rr > 0.0 ? u.dot(mr) / rr : 0.0;
  const Vec d = u - out.fit * r;
  const double err = std::sqrt(std::max(0.0, quad(m, d)));
  const double uu = quad(m, u);
  out.relative = uu > 0.0 ? err / std::sqrt(uu) : 0.0;
  out.scaled = err / std::sqrt(rod.rod.eps);
  return out;
}

std::vector<std::pair<double, double>> localization_profile(const RodPencil& rod, const Vec& u) {
  const double root = std::sqrt(rod.rod.eps);
  std::vector<double> windows = {root, 2 * root, 4 * root, 6 * root, 0.5, 1.0};
  std::sort(windows.begin(), windows.end());
  std::vector<double> mass(windows.size(), 0.0);
  double total = 0.0;
  for_each_quad_point(rod.rod.grid, [&](const QuadPoint& q) {
    const double v = interpolate(rod.rod.grid, u, q);
    const double w = v * v * q.jxw;
    total += w;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (std::abs(q.px) <= windows[i]) mass[i] += w;
    }
  });
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.emplace_back(windows[i], total > 0.0 ? mass[i] / total : 0.0);
  }
  return out;
}

double averaging_diagnostic(const RodPencil& rod, const Vec& u, const CoefficientProblem& p,
                            const CoefficientFn& w) {
  const CoefficientFn fn = w ? w : CoefficientFn([&p](double x1, double y1, double y2) {
    return p.weight(x1, y1, y2);
  });
  const Grid& g = rod.rod.grid;
  const CoordinateMap map = rod_coordinates(rod.rod.eps, rod.per_period);

  // Cell average of w(x1, .) on a 64 x 64 midpoint grid, written as a
  // reference value plus the mean deviation so a constant w averages exactly.
  std::unordered_map<long long, double> cache;
  const auto average = [&](const QuadPoint& q) {
    const long long key = 2LL * q.ex + (q.xi < 0.5 ? 0 : 1);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
    const double ref = fn(q.px, 0.5, 0.5);
    double dev = 0.0;
    for (int j = 0; j < 64; ++j) {
      for (int i = 0; i < 64; ++i) dev += fn(q.px, (i + 0.5) / 64, (j + 0.5) / 64) - ref;
    }
    const double avg = ref + dev / 4096.0;
    cache.emplace(key, avg);
    return avg;
  };

  const SparseSym bw = assemble_mass(g, [&](const QuadPoint& q) {
    const auto c = map(q);
    return fn(c[0], c[1], c[2]);
  });
  const SparseSym bavg = assemble_mass(g, average);
  const SparseSym m = assemble_mass(g);
  const SparseSym k = assemble_stiffness(g, [](const QuadPoint&) { return Sym2{1.0, 0.0, 1.0}; });
  const double diff = quad(bw, u) - quad(bavg, u);
  const double denom = rod.rod.eps * std::sqrt(quad(m, u)) * std::sqrt(quad(k, u));
  return diff / denom;
}

ConvergenceReport sweep(const CoefficientProblem& p, const SweepOptions& opt) {
  if (opt.j_max < 1) throw Error(ErrorKind::kInvalidArgument, "jmax must be at least 1");
  if (opt.eps.empty()) throw Error(ErrorKind::kInvalidArgument, "empty eps list");
  std::vector<double> eps = opt.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    even_reciprocal(eps[i]);
    if (i > 0 && !(eps[i] < eps[i - 1])) throw Error(ErrorKind::kInvalidArgument, "duplicate eps value");
  }
  if (opt.policy.per_period < kMinElementsPerPeriod) {
    const int required = static_cast<int>(std::ceil(2.0 * kMinElementsPerPeriod / eps.back()));
    throw UnderResolvedError("rod policy resolves a period with fewer than " +
                                 std::to_string(kMinElementsPerPeriod) + " elements (m1 >= " +
                                 std::to_string(required) + " needed)",
                             required);
  }

  ConvergenceReport rep;
  rep.problem = p.name;
  rep.policy = opt.policy;
  rep.normalization = opt.normalization;
  rep.factorization_skipped = !p.scalar_a;

  try {
    rep.hypotheses = check_hypotheses(p, default_x1_samples());
  } catch (const Error& e) {
    rethrow_with_stage(e, "check_hypotheses");
  }
  if (!rep.hypotheses.all_pass()) {
    std::string failed;
    if (rep.hypotheses.h2 != Verdict::kPass) failed += " H2";
    if (rep.hypotheses.h3 != Verdict::kPass) failed += " H3";
    if (rep.hypotheses.h4 != Verdict::kPass) failed += " H4";
    if (rep.hypotheses.h5 != Verdict::kPass) failed += " H5";
    throw Error(ErrorKind::kHypothesisViolated, "check_hypotheses: failed" + failed);
  }

  EffectiveOptions eo = opt.effective;
  std::tie(eo.n1, eo.n2) = opt.policy.cell_grid();
  rep.model = build_effective_model(p, eo);
  rep.spec = oscillator_spec(rep.model);
  try {
    rep.spec.validate();
  } catch (const Error& e) {
    rethrow_with_stage(e, "oscillator");
  }
  for (int j = 1; j <= opt.j_max; ++j) rep.nu.push_back(nu_closed_form(rep.spec, j));

  rep.rows = parallel_map(static_cast<int>(eps.size()), [&](int i) {
    const double e = eps[i];
    try {
      const auto start = std::chrono::steady_clock::now();
      const RodPencil rod = assemble_rod(p, e, opt.policy);
      if (!opt.dump_mm_dir.empty()) {
        std::filesystem::create_directories(opt.dump_mm_dir);
        const std::string stem = opt.dump_mm_dir + "/rod_eps" + std::to_string(std::lround(1.0 / e));
        write_matrix_market(rod.a, stem + "_A.mtx");
        write_matrix_market(rod.b, stem + "_B.mtx");
      }
      SpectrumOptions so;
      so.k = opt.j_max;
      so.sigma = opt.shift_fraction * rep.model.mu0 / (e * e);
      so.tol = opt.tol;
      so.normalization = opt.normalization;
      const SpectrumTable t = positive_spectrum(rod, so);

      EpsilonRow row;
      row.eps = e;
      row.m1 = rod.rod.m1;
      row.m2 = rod.rod.m2;
      row.dofs = rod.reduction.reduced_dim();
      row.shift = t.shift;
      row.iterations = t.iterations;
      row.clustered = t.clustered;
      for (int j = 1; j <= opt.j_max; ++j) {
        const double lam = t.lambda[j - 1];
        row.lambda.push_back(lam);
        row.predicted.push_back(predicted(rep.model, rep.spec, e, j));
        row.leading_error.push_back(e * e * lam - rep.model.mu0);
        row.first_error.push_back(e * (lam - rep.model.mu0 / (e * e)) - rep.nu[j - 1]);
        row.residuals.push_back(t.residuals[j - 1]);
        if (!rep.factorization_skipped) {
          row.factorization.push_back(factorization_error(rod, t.u.col(j - 1), rep.model, rep.spec, j));
        }
      }
      row.localization = localization_profile(rod, t.u.col(0));
      row.averaging = averaging_diagnostic(rod, t.u.col(0), p);
      if (opt.negative_probe) row.negative_eigenvalue = negative_branch_probe(rod.a, rod.b);
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return row;
    } catch (const Error& err) {
      rethrow_with_stage(err, "rod eps=" + eps_label(e));
    }
  });
  return rep;
}

}  // namespace thinspec
