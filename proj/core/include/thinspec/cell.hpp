#pragma once

#include <string>
#include <vector>

#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/mesh.hpp"
#include "thinspec/problem.hpp"
#include "thinspec/sparse.hpp"

namespace thinspec {

// Stiffness A(x1), weighted mass B_rho(x1) and unweighted mass M on the cell.
struct CellOperators {
  SparseSym a;
  SparseSym b;
  SparseSym m;
};
CellOperators assemble_cell(const CoefficientProblem& p, double x1, const Grid& cell);

struct CellEigenpair {
  double x1 = 0.0;
  double mu = 0.0;
  Vec psi;                    // psi^T B_rho psi = 1, strictly positive
  double residual = 0.0;      // ||A psi - mu B psi||_{M^-1} / ((1 + mu) ||psi||_M)
  double normalization = 0.0; // psi^T B_rho psi
};

// Throws NoPositivePrincipal when the weight average is nonnegative on the
// mesh and InvalidPrincipal if the eigenvector is not strictly positive.
CellEigenpair principal_cell_eig(const CoefficientProblem& p, double x1, const Grid& cell,
                                 const PrincipalOptions& opt = {});

// Derivative of mu from the eigenpair: psi^T (A' - mu B') psi with A', B'
// assembled from x1-differences of the coefficients.
double mu_prime(const CoefficientProblem& p, const CellEigenpair& pair, const Grid& cell,
                double step = 1e-6);

struct Mu2Result {
  double mu0 = 0.0;
  double mu2 = 0.0;          // Richardson combination of d_h and d_h2
  double d_h = 0.0;          // five-point second difference, step h
  double d_h2 = 0.0;         // same with step h/2
  double noise_floor = 0.0;  // mu2 must exceed this
  double h = 0.05;
  std::vector<ScanPoint> scan;  // x1 = -1, -0.75, ..., 1
  CellEigenpair at_zero;
};

// Throws H6ViolatedError unless mu2 > noise_floor and mu(0) is strictly
// below mu at every other scan point.
Mu2Result mu_second_at_zero(const CoefficientProblem& p, const Grid& cell, double h = 0.05,
                            const PrincipalOptions& opt = {});

struct CorrectorField {
  std::string kind;  // "case1" or "weighted"
  int component = 1;
  double x1 = 0.0;
  Vec values;
  double weighted_mean = 0.0;  // M-weighted mean after the gauge fix
};

struct Case1Corrector {
  CorrectorField n11;
  double a_eff = 0.0;       // int a11 + a1j d_j N
  double a_eff_energy = 0.0;
};

// Periodic corrector: int a grad N . grad phi = - int (a e1) . grad phi.
Case1Corrector corrector_case1(const CoefficientProblem& p, double x1, const Grid& cell);

struct WeightedCorrector {
  CorrectorField n1;
  CorrectorField n2;
  Eigen::Matrix2d a_eff_integral;  // int (a_psi)_ik (delta_kj + d_k N_j)
  Eigen::Matrix2d a_eff_energy;    // int a_psi grad(N_k + z_k) . grad(N_i + z_i)
  double a_eff = 0.0;              // a_eff_energy(0, 0)
};

// Corrector with weight a_psi = a(0, .) psi0^2, psi0 interpolated bilinearly.
WeightedCorrector corrector_weighted(const CoefficientProblem& p, const Grid& cell,
                                     const Vec& psi0);

// c_eff from eigenvectors at x1 = -h, 0, h (central differences in x1).
double c_effective(const CoefficientProblem& p, const Grid& cell, const Vec& psi_minus,
                   const Vec& psi0, const Vec& psi_plus, double h);

// int rho(x1, .) psi^2 on the cell.
double rho_psi_average(const CoefficientProblem& p, const Grid& cell, const Vec& psi,
                       double x1 = 0.0);

struct EffectiveOptions {
  int n1 = 64;
  int n2 = 64;
  double h_mu2 = 0.05;
  double h_psi = 0.02;
  bool aeff_unweighted = false;
  PrincipalOptions principal;
};

struct EffectiveModel {
  double mu0 = 0.0;
  double mu2 = 0.0;
  double a_eff = 0.0;
  double c_eff = 0.0;
  double rho_psi_avg = 0.0;

  double a_eff_weighted = 0.0;
  double a_eff_unweighted = 0.0;
  bool aeff_unweighted = false;
  Eigen::Matrix2d a_eff_matrix = Eigen::Matrix2d::Zero();
  double mu2_coarse = 0.0;
  double mu2_fine = 0.0;
  std::vector<ScanPoint> scan;

  int n1 = 0;
  int n2 = 0;
  double h_mu2 = 0.0;
  double h_psi = 0.0;
  Vec psi0;  // Psi(0, .) on the n1 x n2 cell grid
};

// Errors from the stages are rethrown with a stage label.
EffectiveModel build_effective_model(const CoefficientProblem& p, const EffectiveOptions& opt = {});

}  // namespace thinspec
