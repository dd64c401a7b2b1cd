#include "thinspec/mesh.hpp"

#include <algorithm>
#include <string>

#include "thinspec/errors.hpp"

namespace thinspec {

Grid make_cell_grid(int n1, int n2) {
  if (n1 < 2 || n2 < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "cell grid needs n1 >= 2 and n2 >= 1, got " + std::to_string(n1) + "x" +
                    std::to_string(n2));
  }
  Grid g;
  g.nx = n1;
  g.ny = n2;
  g.hx = 1.0 / n1;
  g.hy = 1.0 / n2;
  g.periodic_x = true;
  return g;
}

double RodGrid::max_aspect_ratio() const {
  return std::max(grid.hx / grid.hy, grid.hy / grid.hx);
}

RodGrid make_rod_grid(double eps, int m1, int m2) {
  if (!(eps > 0.0) || m1 < 2 || m2 < 1) {
    throw Error(ErrorKind::kInvalidArgument, "rod grid needs eps > 0, m1 >= 2, m2 >= 1");
  }
  RodGrid r;
  r.eps = eps;
  r.m1 = m1;
  r.m2 = m2;
  r.grid.nx = m1;
  r.grid.ny = m2;
  r.grid.x0 = -1.0;
  r.grid.y0 = 0.0;
  r.grid.hx = 2.0 / m1;
  r.grid.hy = eps / m2;
  r.grid.periodic_x = false;
  if (r.max_aspect_ratio() > kMaxAspectRatio) {
    throw Error(ErrorKind::kInvalidArgument,
                "rod element aspect ratio " + std::to_string(r.max_aspect_ratio()) +
                    " exceeds " + std::to_string(kMaxAspectRatio));
  }
  for (int j = 0; j <= m2; ++j) {
    r.dirichlet.push_back(r.grid.dof(0, j));
    r.dirichlet.push_back(r.grid.dof(m1, j));
  }
  std::sort(r.dirichlet.begin(), r.dirichlet.end());
  return r;
}

std::vector<std::array<double, 2>> dof_coordinates(const Grid& g) {
  std::vector<std::array<double, 2>> xy(g.num_dofs());
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) xy[g.dof(i, j)] = {g.node_x(i), g.node_y(j)};
  }
  return xy;
}

}  // namespace thinspec
