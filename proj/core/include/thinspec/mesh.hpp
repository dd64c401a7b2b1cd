#pragma once

#include <array>
#include <vector>

namespace thinspec {

// Uniform tensor-product grid of nx x ny rectangular elements starting at
// (x0, y0). With periodic_x the node column i = nx is identified with i = 0.
struct Grid {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  bool periodic_x = false;

  int nodes_x() const { return periodic_x ? nx : nx + 1; }
  int num_dofs() const { return nodes_x() * (ny + 1); }
  int num_elements() const { return nx * ny; }

  // Node (i, j) with 0 <= i <= nx, 0 <= j <= ny.
  int dof(int i, int j) const { return j * nodes_x() + (periodic_x && i == nx ? 0 : i); }
  double node_x(int i) const { return x0 + i * hx; }
  double node_y(int j) const { return y0 + j * hy; }

  // Local order (0,0), (1,0), (1,1), (0,1).
  std::array<int, 4> element_dofs(int ex, int ey) const {
    return {dof(ex, ey), dof(ex + 1, ey), dof(ex + 1, ey + 1), dof(ex, ey + 1)};
  }
};

// The periodicity cell [0,1]^2, periodic in y1 and free (Neumann) in y2.
Grid make_cell_grid(int n1, int n2);

// The rod (-1,1) x (0,eps) with Dirichlet nodes at x1 = +-1.
struct RodGrid {
  double eps = 0.0;
  int m1 = 0;
  int m2 = 0;
  Grid grid;
  std::vector<int> dirichlet;  // sorted full-grid DOF indices

  double max_aspect_ratio() const;
};

inline constexpr double kMaxAspectRatio = 20.0;

// Throws InvalidArgument when an element would be more elongated than
// kMaxAspectRatio.
RodGrid make_rod_grid(double eps, int m1, int m2);

// Nodal coordinates of the DOFs (x then y), for both grid kinds.
std::vector<std::array<double, 2>> dof_coordinates(const Grid& g);

}  // namespace thinspec
