#pragma once

#include <vector>

#include "thinspec/sparse.hpp"

namespace thinspec {

// Limit operator  -a_eff w'' + (mu2/2 z^2 + c_eff) w = nu rho_avg w  on R.
// nu_closed_form and theta are exact for this operator at any rho_avg; the
// effective model normalizes int rho Psi^2 = 1, so rho_avg = 1 there and a
// rho_avg factor on the potential would make no difference.
struct OscillatorSpec {
  double a_eff = 1.0;
  double c_eff = 0.0;
  double mu2 = 2.0;
  double rho_avg = 1.0;

  double theta() const { return mu2 / (2.0 * a_eff); }
  void validate() const;  // throws InvalidArgument
};

double nu_closed_form(const OscillatorSpec& s, int j);

inline constexpr int kMaxHermiteIndex = 12;

// Index-shifted Hermite polynomials H_1 = 1, H_2 = -2x,
// H_{j+1} = -2x H_j - 2(j-1) H_{j-1}; H_j = (-1)^{j-1} times the standard
// physicists' polynomial of degree j-1.
double hermite(int j, double x);

// w_j(z) = H_j(theta^{1/4} z) exp(-sqrt(theta) z^2 / 2), unnormalised.
double eigenfunction_w(const OscillatorSpec& s, int j, double z);
// L2(R) norm of w_j: sqrt(sqrt(pi) 2^{j-1} (j-1)! / theta^{1/4}).
double eigenfunction_norm(const OscillatorSpec& s, int j);
// w_j divided by its L2 norm.
double eigenfunction_unit(const OscillatorSpec& s, int j, double z);

// max(8, 6 / theta^{1/4}).
double default_truncation(const OscillatorSpec& s);

struct TruncatedSolution {
  double half_width = 0.0;   // L actually used
  int n = 0;                 // elements of the coarse mesh
  std::vector<double> nu;    // extrapolated eigenvalues
  std::vector<double> nu_coarse;
  std::vector<double> nu_fine;
  Vec nodes;                 // coarse mesh nodes including the endpoints
  Mat vectors;               // coarse-mesh eigenvectors (nodal, with zero ends), unit L2 norm
  Mat gram;                  // rho_avg-weighted L2 Gram matrix of `vectors`
};

// Piecewise-linear FEM on (-L, L) with Dirichlet ends, n and 2n elements,
// combined by Richardson extrapolation (4 nu_{2n} - nu_n) / 3. L is raised
// until exp(-sqrt(theta) L^2) <= 1e-10.
TruncatedSolution solve_truncated(const OscillatorSpec& s, double half_width, int n, int k);

// Sign changes of a nodal vector, ignoring entries below tol * max |v|.
int sign_changes(const Vec& v, double tol = 1e-8);

}  // namespace thinspec
