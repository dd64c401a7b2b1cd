#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

namespace thinspec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Symmetric sparse matrix. Both triangles are stored; assembly writes each
// element contribution symmetrically, so symmetry is exact in floating point.
using SparseSym = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

bool is_exactly_symmetric(const SparseSym& s);
bool all_finite(const SparseSym& s);

// Writes the lower triangle in Matrix Market "coordinate real symmetric" form.
void write_matrix_market(const SparseSym& s, const std::string& path);

// Convenience quadratic form v^T S v.
inline double quad(const SparseSym& s, const Vec& v) { return v.dot(s * v); }

}  // namespace thinspec
