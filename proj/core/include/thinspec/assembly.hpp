#pragma once

#include <array>
#include <functional>
#include <vector>

#include "thinspec/mesh.hpp"
#include "thinspec/problem.hpp"
#include "thinspec/sparse.hpp"

namespace thinspec {

// A 2x2 Gauss point of one element. (xi, eta) are reference coordinates in
// [0,1]^2, (px, py) the physical position, jxw the quadrature weight times
// the element area.
struct QuadPoint {
  int ex = 0;
  int ey = 0;
  double xi = 0.0;
  double eta = 0.0;
  double px = 0.0;
  double py = 0.0;
  double jxw = 0.0;
};

using ScalarField = std::function<double(const QuadPoint&)>;
using TensorField = std::function<Sym2(const QuadPoint&)>;
using VectorField = std::function<std::array<double, 2>(const QuadPoint&)>;

// Visits every Gauss point in a fixed element-major order.
void for_each_quad_point(const Grid& g, const std::function<void(const QuadPoint&)>& fn);

// Bilinear interpolation of a nodal field and its gradient.
double interpolate(const Grid& g, const Vec& nodal, const QuadPoint& q);
std::array<double, 2> interpolate_gradient(const Grid& g, const Vec& nodal, const QuadPoint& q);

// Sum over Gauss points of f * jxw.
double integrate(const Grid& g, const ScalarField& f);

// Stiffness  int a grad(phi_i) . grad(phi_j).
SparseSym assemble_stiffness(const Grid& g, const TensorField& a);
// Mass  int w phi_i phi_j; an empty field means w = 1.
SparseSym assemble_mass(const Grid& g, const ScalarField& w = {});
// Load  int f . grad(phi_i).
Vec assemble_load(const Grid& g, const VectorField& f);

// Maps Gauss points to the arguments (x1, y1, y2) of the coefficients.
using CoordinateMap = std::function<std::array<double, 3>(const QuadPoint&)>;

// Cell grid at fixed slow variable x1: (x1, y1, y2) = (x1, px, py).
CoordinateMap cell_coordinates(double x1);
// Rod grid: (x1, y1, y2) = (px, frac(px/eps), py/eps).
CoordinateMap rod_coordinates(double eps);
// Same map when each period holds exactly `elements_per_period` elements in
// x1: the fast variable is taken from the element index, so coefficient
// samples repeat bit for bit from one period to the next.
CoordinateMap rod_coordinates(double eps, int elements_per_period);

TensorField conductivity(const CoefficientProblem& p, CoordinateMap map);
ScalarField weight(const CoefficientProblem& p, CoordinateMap map);

// Symmetric elimination of essential DOFs.
class Reduction {
 public:
  Reduction(int full_dim, const std::vector<int>& fixed);

  int full_dim() const { return full_dim_; }
  int reduced_dim() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free_dofs() const { return free_; }

  Vec restrict_vector(const Vec& full) const;
  Vec prolong(const Vec& reduced) const;  // zeros at fixed DOFs
  SparseSym apply(const SparseSym& full) const;

 private:
  int full_dim_;
  std::vector<int> free_;
};

SparseSym apply_dirichlet(const SparseSym& m, const Reduction& r);

}  // namespace thinspec
