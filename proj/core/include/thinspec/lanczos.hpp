#pragma once

#include <cstdint>
#include <functional>

#include "thinspec/sparse.hpp"

namespace thinspec {

using LinearOp = std::function<void(const Vec& in, Vec& out)>;

struct LanczosOptions {
  int nev = 1;
  bool largest = true;          // algebraically largest, else smallest
  double tol = 1e-12;           // |beta * s_m| <= tol * max |theta|
  int max_iter = 500;           // total operator applications
  int max_basis = 0;            // Krylov dimension per cycle, 0 = automatic
  std::uint64_t seed = 20240611;
  // After nev pairs are locked, restart from fresh random vectors to pick
  // up further copies of a multiple eigenvalue (up to 3 probes).
  bool probe_multiplicity = true;
  const Vec* start = nullptr;
};

struct LanczosResult {
  Vec values;    // wanted end first
  Mat vectors;   // orthonormal in the chosen inner product
  int iterations = 0;
  bool converged = false;
  double worst_estimate = 0.0;  // largest |beta * s_m| among returned pairs
};

// Lanczos with full reorthogonalisation for an operator that is
// self-adjoint in the inner product <x, y> = x^T W y (W = identity when
// `inner` is null). Converged Ritz pairs are locked and deflated; when the
// basis fills up the iteration restarts from the unconverged wanted Ritz
// vectors. Breakdown restarts from a fresh random vector.
LanczosResult lanczos(const LinearOp& op, const SparseSym* inner, int n,
                      const LanczosOptions& opt);

}  // namespace thinspec
