#pragma once

#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <optional>

#include "thinspec/sparse.hpp"

namespace thinspec {

// Sparse Cholesky with fill-reducing ordering: P S P^T = L L^T.
class Cholesky {
 public:
  explicit Cholesky(const SparseSym& s);  // throws NotSPD

  int dim() const { return dim_; }
  Vec solve(const Vec& b) const;
  // x -> L^{-1} P x  and  x -> P^T L^{-T} x, so that S^{-1} = (second)(first).
  Vec forward(const Vec& x) const;
  Vec backward(const Vec& x) const;

 private:
  int dim_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseSym, Eigen::Lower, Eigen::AMDOrdering<int>>> llt_;
};

struct SolverOptions {
  double tol = 1e-10;     // accepted residual
  int max_iter = 500;     // Lanczos operator applications
  std::uint64_t seed = 20240611;
  bool probe_multiplicity = true;
  const Vec* start = nullptr;
};

struct EigResult {
  Vec values;      // ascending
  Mat vectors;     // columns
  Vec residuals;
  int iterations = 0;
  double shift = 0.0;
};

// Smallest pencil eigenvalues of (A, M), M SPD, by shift-invert Lanczos on
// (A + sigma M)^{-1} M with sigma from gershgorin_shift (doubled while A +
// sigma M is not SPD), then block inverse iteration shifted just below the
// computed lambda_1 until the residuals meet tol. Eigenvectors are
// M-orthonormal. The residual of a pair is
// ||A v - lambda M v||_{M^{-1}} / ((1 + |lambda|) ||v||_M).
EigResult smallest_eigs(const SparseSym& a, const SparseSym& m, int k,
                        const SolverOptions& opt = {});

// sigma = 1 + |min(0, min_i (A_ii - sum_{j != i} |A_ij|) / (sum_j M_ij))|.
double gershgorin_shift(const SparseSym& a, const SparseSym& m);

// A stiffness-like, B weighted mass (possibly indefinite), M unweighted mass.
struct PencilSpec {
  const SparseSym& a;
  const SparseSym& b;
  const SparseSym& m;
};

struct Alpha1 {
  double alpha = 0.0;
  Vec psi;            // M-normalised
  double residual = 0.0;
  int iterations = 0;
};

// Smallest eigenvalue of (A - mu B, M).
Alpha1 alpha1(const PencilSpec& p, double mu, const SolverOptions& opt = {});

struct PrincipalOptions {
  double rel_tol = 1e-9;
  int max_iter = 80;
  double mu_max = 1e8;
  SolverOptions eig = {1e-10, 500, 20240611, false, nullptr};
};

struct PrincipalPair {
  double mu = 0.0;
  Vec psi;                 // psi^T B psi = 1, positive M-weighted mean
  double alpha = 0.0;      // alpha1 at the returned mu
  double residual = 0.0;   // eigen-solver residual of the last alpha1 solve
  int bracket_steps = 0;
  int newton_steps = 0;
  int bisection_steps = 0;
};

// Unique positive root of the concave function mu -> alpha1(mu).
PrincipalPair principal_positive(const PencilSpec& p, const PrincipalOptions& opt = {});

struct PositiveOptions {
  int k = 1;
  double sigma = 0.0;   // spectral shift below lambda_1^+, 0 = unshifted
  double tol = 1e-10;   // relative backward error
  int max_iter = 1000;
  std::uint64_t seed = 20240611;
  bool probe_multiplicity = true;
};

// Smallest positive eigenvalues of A u = lambda B u for A SPD and B
// indefinite. Factors K = A - sigma B = L L^T and runs Lanczos on
// L^{-1} B L^{-T} for its largest eigenvalues theta, lambda = sigma + 1/theta.
// If K is not positive definite the shift is halved and retried (falling
// back to sigma = 0). The residual is the relative backward error
// ||A u - lambda B u|| / ((||A||_1 + |lambda| ||B||_1) ||u||).
EigResult positive_pencil_spectrum(const SparseSym& a, const SparseSym& b,
                                   const PositiveOptions& opt = {});

// Largest (closest to zero) negative eigenvalue of A u = lambda B u, or
// nullopt when the Lanczos probe finds no negative eigenvalue.
std::optional<double> negative_branch_probe(const SparseSym& a, const SparseSym& b,
                                            std::uint64_t seed = 20240611);

inline constexpr int kDenseLimit = 3000;

struct DenseSpectrum {
  Vec values;   // ascending
  Mat vectors;
};

// All eigenpairs of (A, M) with M SPD. Throws SizeExceeded above kDenseLimit.
DenseSpectrum dense_oracle(const SparseSym& a, const SparseSym& m);
// Ascending positive eigenvalues of (A, B) with A SPD, via theta = 1/lambda
// of (B, A).
Vec dense_positive_branch(const SparseSym& a, const SparseSym& b);

}  // namespace thinspec
