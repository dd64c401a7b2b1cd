#include "thinspec/cell.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "thinspec/assembly.hpp"
#include "thinspec/parallel.hpp"

namespace thinspec {
namespace {

double m_norm_inverse(const Cholesky& mchol, const Vec& r) {
  return std::sqrt(std::max(0.0, r.dot(mchol.solve(r))));
}

// Solves the singular periodic/Neumann system A x = rhs by pinning DOF 0,
// then shifts x to zero M-weighted mean.
Vec solve_with_gauge(const SparseSym& a, const SparseSym& m, const Vec& rhs, double* mean_out) {
  const int n = static_cast<int>(a.rows());
  const Reduction pin(n, {0});
  const Cholesky chol(pin.apply(a));
  Vec x = pin.prolong(chol.solve(pin.restrict_vector(rhs)));
  const Vec ones = Vec::Ones(n);
  const Vec m1 = m * ones;
  x.array() -= m1.dot(x) / m1.sum();
  if (mean_out) *mean_out = m1.dot(x) / m1.sum();
  return x;
}

// mu(x1) at each point, computed as independent jobs.
std::vector<double> mu_at(const CoefficientProblem& p, const Grid& cell,
                          const std::vector<double>& xs, const PrincipalOptions& opt) {
  return parallel_map(static_cast<int>(xs.size()),
                      [&](int i) { return principal_cell_eig(p, xs[i], cell, opt).mu; });
}

double five_point(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
  return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
}

}  // namespace

CellOperators assemble_cell(const CoefficientProblem& p, double x1, const Grid& cell) {
  const CoordinateMap map = cell_coordinates(x1);
  return {assemble_stiffness(cell, conductivity(p, map)), assemble_mass(cell, weight(p, map)),
          assemble_mass(cell)};
}

CellEigenpair principal_cell_eig(const CoefficientProblem& p, double x1, const Grid& cell,
                                 const PrincipalOptions& opt) {
  const CellOperators ops = assemble_cell(p, x1, cell);
  const PrincipalPair pp = principal_positive({ops.a, ops.b, ops.m}, opt);

  CellEigenpair out;
  out.x1 = x1;
  out.mu = pp.mu;
  out.psi = pp.psi;
  if (!(out.psi.minCoeff() > 0.0)) {
    throw Error(ErrorKind::kInvalidPrincipal,
                "principal eigenvector is not strictly positive at x1 = " + std::to_string(x1));
  }
  const Cholesky mchol(ops.m);
  const Vec r = ops.a * out.psi - out.mu * (ops.b * out.psi);
  out.residual = m_norm_inverse(mchol, r) / ((1.0 + out.mu) * std::sqrt(quad(ops.m, out.psi)));
  out.normalization = quad(ops.b, out.psi);
  return out;
}

double mu_prime(const CoefficientProblem& p, const CellEigenpair& pair, const Grid& cell,
                double step) {
  if (pair.psi.size() != cell.num_dofs()) {
    throw Error(ErrorKind::kInvalidArgument, "mu_prime: eigenpair does not match the grid");
  }
  const double x1 = pair.x1;
  const SparseSym da = assemble_stiffness(cell, [&](const QuadPoint& q) {
    return p.da_dx1(x1, q.px, q.py, step);
  });
  const SparseSym db = assemble_mass(cell, [&](const QuadPoint& q) {
    return p.drho_dx1(x1, q.px, q.py, step);
  });
  const SparseSym b = assemble_mass(cell, weight(p, cell_coordinates(x1)));
  return (quad(da, pair.psi) - pair.mu * quad(db, pair.psi)) / quad(b, pair.psi);
}

Mu2Result mu_second_at_zero(const CoefficientProblem& p, const Grid& cell, double h,
                            const PrincipalOptions& opt) {
  Mu2Result out;
  out.h = h;
  out.at_zero = principal_cell_eig(p, 0.0, cell, opt);
  out.mu0 = out.at_zero.mu;

  const std::vector<double> fd_x = {-2 * h, -h, -h / 2, h / 2, h, 2 * h};
  const std::vector<double> scan_x = {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> xs = fd_x;
  xs.insert(xs.end(), scan_x.begin(), scan_x.end());
  const std::vector<double> mu = mu_at(p, cell, xs, opt);

  out.d_h = five_point(mu[0], mu[1], out.mu0, mu[4], mu[5], h);
  out.d_h2 = five_point(mu[1], mu[2], out.mu0, mu[3], mu[4], h / 2);
  out.mu2 = (16.0 * out.d_h2 - out.d_h) / 15.0;
  out.noise_floor = 1e-4 * std::max(1.0, std::abs(out.mu0));

  bool interior_min = true;
  for (std::size_t i = 0; i < scan_x.size(); ++i) {
    const double m = mu[fd_x.size() + i];
    if (scan_x[i] == 0.25) out.scan.push_back({0.0, out.mu0});
    out.scan.push_back({scan_x[i], m});
    interior_min = interior_min && out.mu0 < m;
  }
  if (!(out.mu2 > out.noise_floor) || !interior_min) {
    std::string why = !interior_min ? "mu(0) is not below every other scan point"
                                    : "mu''(0) = " + std::to_string(out.mu2) +
                                          " is not positive above the noise floor " +
                                          std::to_string(out.noise_floor);
    throw H6ViolatedError("no strict interior minimum of mu at x1 = 0: " + why, out.scan, out.mu2);
  }
  return out;
}

Case1Corrector corrector_case1(const CoefficientProblem& p, double x1, const Grid& cell) {
  const CoordinateMap map = cell_coordinates(x1);
  const SparseSym a = assemble_stiffness(cell, conductivity(p, map));
  const SparseSym m = assemble_mass(cell);
  const Vec f = assemble_load(cell, [&](const QuadPoint& q) -> std::array<double, 2> {
    const Sym2 c = p.a(x1, q.px, q.py);
    return {c.a11, c.a12};
  });
  Case1Corrector out;
  out.n11.kind = "case1";
  out.n11.x1 = x1;
  out.n11.values = solve_with_gauge(a, m, -f, &out.n11.weighted_mean);
  const double mean_a11 = integrate(cell, [&](const QuadPoint& q) { return p.a(x1, q.px, q.py).a11; });
  const Vec& n = out.n11.values;
  out.a_eff = mean_a11 + f.dot(n);
  out.a_eff_energy = mean_a11 + 2.0 * f.dot(n) + quad(a, n);
  return out;
}

WeightedCorrector corrector_weighted(const CoefficientProblem& p, const Grid& cell, const Vec& psi0) {
  if (psi0.size() != cell.num_dofs()) {
    throw Error(ErrorKind::kInvalidArgument, "corrector_weighted: psi0 does not match the grid");
  }
  const auto a_psi = [&](const QuadPoint& q) {
    const double s = interpolate(cell, psi0, q);
    const Sym2 c = p.a(0.0, q.px, q.py);
    return Sym2{c.a11 * s * s, c.a12 * s * s, c.a22 * s * s};
  };
  const SparseSym a = assemble_stiffness(cell, a_psi);
  const SparseSym m = assemble_mass(cell);

  WeightedCorrector out;
  std::array<CorrectorField*, 2> fields = {&out.n1, &out.n2};
  for (int j = 0; j < 2; ++j) {
    const Vec f = assemble_load(cell, [&](const QuadPoint& q) -> std::array<double, 2> {
      const Sym2 c = a_psi(q);
      return j == 0 ? std::array<double, 2>{c.a11, c.a12} : std::array<double, 2>{c.a12, c.a22};
    });
    CorrectorField& field = *fields[j];
    field.kind = "weighted";
    field.component = j + 1;
    field.values = solve_with_gauge(a, m, -f, &field.weighted_mean);
  }

  // Columns j of the gradients of N_j + zeta_j at each Gauss point.
  out.a_eff_integral.setZero();
  out.a_eff_energy.setZero();
  for_each_quad_point(cell, [&](const QuadPoint& q) {
    const Sym2 c = a_psi(q);
    Eigen::Matrix2d am;
    am << c.a11, c.a12, c.a12, c.a22;
    Eigen::Matrix2d g;
    for (int j = 0; j < 2; ++j) {
      const auto gn = interpolate_gradient(cell, fields[j]->values, q);
      g(0, j) = gn[0] + (j == 0 ? 1.0 : 0.0);
      g(1, j) = gn[1] + (j == 1 ? 1.0 : 0.0);
    }
    out.a_eff_integral += q.jxw * (am * g);
    out.a_eff_energy += q.jxw * (g.transpose() * am * g);
  });
  out.a_eff = out.a_eff_energy(0, 0);
  return out;
}

double c_effective(const CoefficientProblem& p, const Grid& cell, const Vec& psi_minus,
                   const Vec& psi0, const Vec& psi_plus, double h) {
  const int n = cell.num_dofs();
  if (psi_minus.size() != n || psi0.size() != n || psi_plus.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "c_effective: eigenvectors do not match the grid");
  }
  const SparseSym m = assemble_mass(cell);
  if (!(quad(m, psi0) > 0.0) || !(psi_minus.dot(m * psi0) > 0.0) || !(psi_plus.dot(m * psi0) > 0.0)) {
    throw Error(ErrorKind::kInternal,
                "c_effective: eigenvectors at x1 = -h, 0, h have inconsistent signs");
  }
  const auto axial_flux = [&](double x1, const Vec& psi, const QuadPoint& q) {
    const Sym2 c = p.a(x1, q.px, q.py);
    const auto g = interpolate_gradient(cell, psi, q);
    return c.a11 * g[0] + c.a12 * g[1];
  };
  return integrate(cell, [&](const QuadPoint& q) {
    const double dpsi = (interpolate(cell, psi_plus, q) - interpolate(cell, psi_minus, q)) / (2 * h);
    const double dflux = (axial_flux(h, psi_plus, q) - axial_flux(-h, psi_minus, q)) / (2 * h);
    return dpsi * axial_flux(0.0, psi0, q) - dflux * interpolate(cell, psi0, q);
  });
}

double rho_psi_average(const CoefficientProblem& p, const Grid& cell, const Vec& psi, double x1) {
  const SparseSym b = assemble_mass(cell, weight(p, cell_coordinates(x1)));
  return quad(b, psi);
}

EffectiveModel build_effective_model(const CoefficientProblem& p, const EffectiveOptions& opt) {
  const Grid cell = make_cell_grid(opt.n1, opt.n2);
  EffectiveModel model;
  model.n1 = opt.n1;
  model.n2 = opt.n2;
  model.h_mu2 = opt.h_mu2;
  model.h_psi = opt.h_psi;
  model.aeff_unweighted = opt.aeff_unweighted;

  try {
    principal_cell_eig(p, 0.0, cell, opt.principal);
  } catch (const Error& e) {
    rethrow_with_stage(e, "principal_cell_eig");
  }

  Mu2Result mu2;
  try {
    mu2 = mu_second_at_zero(p, cell, opt.h_mu2, opt.principal);
  } catch (const Error& e) {
    rethrow_with_stage(e, "mu_second_at_zero");
  }
  model.mu0 = mu2.mu0;
  model.mu2 = mu2.mu2;
  model.mu2_coarse = mu2.d_h;
  model.mu2_fine = mu2.d_h2;
  model.scan = mu2.scan;
  model.psi0 = mu2.at_zero.psi;

  try {
    const WeightedCorrector wc = corrector_weighted(p, cell, model.psi0);
    model.a_eff_weighted = wc.a_eff;
    model.a_eff_matrix = wc.a_eff_energy;
    model.a_eff_unweighted = corrector_case1(p, 0.0, cell).a_eff;
  } catch (const Error& e) {
    rethrow_with_stage(e, "corrector");
  }
  model.a_eff = opt.aeff_unweighted ? model.a_eff_unweighted : model.a_eff_weighted;

  try {
    const std::vector<double> xs = {-opt.h_psi, opt.h_psi};
    const auto pairs = parallel_map(2, [&](int i) { return principal_cell_eig(p, xs[i], cell, opt.principal); });
    model.c_eff = c_effective(p, cell, pairs[0].psi, model.psi0, pairs[1].psi, opt.h_psi);
  } catch (const Error& e) {
    rethrow_with_stage(e, "c_effective");
  }
  model.rho_psi_avg = rho_psi_average(p, cell, model.psi0);
  return model;
}

}  // namespace thinspec
