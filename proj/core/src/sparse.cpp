#include "thinspec/sparse.hpp"

#include <cmath>
#include <unsupported/Eigen/SparseExtra>

#include "thinspec/errors.hpp"

namespace thinspec {

bool is_exactly_symmetric(const SparseSym& s) {
  if (s.rows() != s.cols()) return false;
  const SparseSym t = s.transpose();
  const SparseSym d = s - t;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(d, k); it; ++it) {
      if (it.value() != 0.0) return false;
    }
  }
  return true;
}

bool all_finite(const SparseSym& s) {
  for (int k = 0; k < s.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(s, k); it; ++it) {
      if (!std::isfinite(it.value())) return false;
    }
  }
  return true;
}

void write_matrix_market(const SparseSym& s, const std::string& path) {
  const SparseSym lower = s.triangularView<Eigen::Lower>();
  if (!Eigen::saveMarket(lower, path, Eigen::Symmetric)) {
    throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  }
}

}  // namespace thinspec
