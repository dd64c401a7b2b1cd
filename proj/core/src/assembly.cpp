#include "thinspec/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "thinspec/errors.hpp"

namespace thinspec {
namespace {

constexpr double kGauss[2] = {0.5 - 0.5 / 1.7320508075688772, 0.5 + 0.5 / 1.7320508075688772};

struct Basis {
  double n[4];
  double dxi[4];
  double deta[4];
};

Basis basis_at(double xi, double eta) {
  Basis b{};
  const double sx[4] = {0, 1, 1, 0};
  const double sy[4] = {0, 0, 1, 1};
  for (int a = 0; a < 4; ++a) {
    const double fx = sx[a] > 0 ? xi : 1.0 - xi;
    const double fy = sy[a] > 0 ? eta : 1.0 - eta;
    const double gx = sx[a] > 0 ? 1.0 : -1.0;
    const double gy = sy[a] > 0 ? 1.0 : -1.0;
    b.n[a] = fx * fy;
    b.dxi[a] = gx * fy;
    b.deta[a] = fx * gy;
  }
  return b;
}

const std::array<Basis, 4>& gauss_bases() {
  static const std::array<Basis, 4> bases = {
      basis_at(kGauss[0], kGauss[0]), basis_at(kGauss[1], kGauss[0]),
      basis_at(kGauss[0], kGauss[1]), basis_at(kGauss[1], kGauss[1])};
  return bases;
}

QuadPoint make_point(const Grid& g, int ex, int ey, int q) {
  QuadPoint p;
  p.ex = ex;
  p.ey = ey;
  p.xi = kGauss[q % 2];
  p.eta = kGauss[q / 2];
  p.px = g.x0 + (ex + p.xi) * g.hx;
  p.py = g.y0 + (ey + p.eta) * g.hy;
  p.jxw = 0.25 * g.hx * g.hy;
  return p;
}

SparseSym finish(const Grid& g, std::vector<Eigen::Triplet<double>>& trips) {
  SparseSym m(g.num_dofs(), g.num_dofs());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  if (!all_finite(m)) throw Error(ErrorKind::kNonFinite, "assembled matrix has non-finite entries");
  return m;
}

int element_index(const QuadPoint& q, int n) { return std::clamp(q.ex, 0, n - 1); }

}  // namespace

void for_each_quad_point(const Grid& g, const std::function<void(const QuadPoint&)>& fn) {
  for (int ey = 0; ey < g.ny; ++ey) {
    for (int ex = 0; ex < g.nx; ++ex) {
      for (int q = 0; q < 4; ++q) fn(make_point(g, ex, ey, q));
    }
  }
}

double interpolate(const Grid& g, const Vec& nodal, const QuadPoint& q) {
  const auto dofs = g.element_dofs(element_index(q, g.nx), q.ey);
  const Basis b = basis_at(q.xi, q.eta);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += b.n[a] * nodal[dofs[a]];
  return v;
}

std::array<double, 2> interpolate_gradient(const Grid& g, const Vec& nodal, const QuadPoint& q) {
  const auto dofs = g.element_dofs(element_index(q, g.nx), q.ey);
  const Basis b = basis_at(q.xi, q.eta);
  double gx = 0.0;
  double gy = 0.0;
  for (int a = 0; a < 4; ++a) {
    gx += b.dxi[a] * nodal[dofs[a]];
    gy += b.deta[a] * nodal[dofs[a]];
  }
  return {gx / g.hx, gy / g.hy};
}

double integrate(const Grid& g, const ScalarField& f) {
  double sum = 0.0;
  for_each_quad_point(g, [&](const QuadPoint& q) { sum += f(q) * q.jxw; });
  return sum;
}

SparseSym assemble_stiffness(const Grid& g, const TensorField& a) {
  const auto& bases = gauss_bases();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(g.num_elements()) * 16);
  for (int ey = 0; ey < g.ny; ++ey) {
    for (int ex = 0; ex < g.nx; ++ex) {
      double ke[4][4] = {};
      for (int q = 0; q < 4; ++q) {
        const QuadPoint p = make_point(g, ex, ey, q);
        const Sym2 c = a(p);
        const Basis& b = bases[q];
        for (int i = 0; i < 4; ++i) {
          const double gix = b.dxi[i] / g.hx;
          const double giy = b.deta[i] / g.hy;
          const double fx = c.a11 * gix + c.a12 * giy;
          const double fy = c.a12 * gix + c.a22 * giy;
          for (int j = i; j < 4; ++j) {
            ke[i][j] += (fx * b.dxi[j] / g.hx + fy * b.deta[j] / g.hy) * p.jxw;
          }
        }
      }
      const auto dofs = g.element_dofs(ex, ey);
      for (int i = 0; i < 4; ++i) {
        trips.emplace_back(dofs[i], dofs[i], ke[i][i]);
        for (int j = i + 1; j < 4; ++j) {
          trips.emplace_back(dofs[i], dofs[j], ke[i][j]);
          trips.emplace_back(dofs[j], dofs[i], ke[i][j]);
        }
      }
    }
  }
  return finish(g, trips);
}

SparseSym assemble_mass(const Grid& g, const ScalarField& w) {
  const auto& bases = gauss_bases();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(g.num_elements()) * 16);
  for (int ey = 0; ey < g.ny; ++ey) {
    for (int ex = 0; ex < g.nx; ++ex) {
      double me[4][4] = {};
      for (int q = 0; q < 4; ++q) {
        const QuadPoint p = make_point(g, ex, ey, q);
        const double c = w ? w(p) : 1.0;
        const Basis& b = bases[q];
        for (int i = 0; i < 4; ++i) {
          for (int j = i; j < 4; ++j) me[i][j] += c * b.n[i] * b.n[j] * p.jxw;
        }
      }
      const auto dofs = g.element_dofs(ex, ey);
      for (int i = 0; i < 4; ++i) {
        trips.emplace_back(dofs[i], dofs[i], me[i][i]);
        for (int j = i + 1; j < 4; ++j) {
          trips.emplace_back(dofs[i], dofs[j], me[i][j]);
          trips.emplace_back(dofs[j], dofs[i], me[i][j]);
        }
      }
    }
  }
  return finish(g, trips);
}

Vec assemble_load(const Grid& g, const VectorField& f) {
  const auto& bases = gauss_bases();
  Vec load = Vec::Zero(g.num_dofs());
  for (int ey = 0; ey < g.ny; ++ey) {
    for (int ex = 0; ex < g.nx; ++ex) {
      const auto dofs = g.element_dofs(ex, ey);
      for (int q = 0; q < 4; ++q) {
        const QuadPoint p = make_point(g, ex, ey, q);
        const auto v = f(p);
        const Basis& b = bases[q];
        for (int i = 0; i < 4; ++i) {
          load[dofs[i]] += (v[0] * b.dxi[i] / g.hx + v[1] * b.deta[i] / g.hy) * p.jxw;
        }
      }
    }
  }
  if (!load.allFinite()) throw Error(ErrorKind::kNonFinite, "assembled load has non-finite entries");
  return load;
}

CoordinateMap cell_coordinates(double x1) {
  return [x1](const QuadPoint& q) -> std::array<double, 3> { return {x1, q.px, q.py}; };
}

CoordinateMap rod_coordinates(double eps) {
  return [eps](const QuadPoint& q) -> std::array<double, 3> {
    const double t = q.px / eps;
    return {q.px, t - std::floor(t), q.py / eps};
  };
}

CoordinateMap rod_coordinates(double eps, int elements_per_period) {
  if (elements_per_period <= 0) return rod_coordinates(eps);
  const int k = elements_per_period;
  return [eps, k](const QuadPoint& q) -> std::array<double, 3> {
    // The rod starts at x1 = -1, an integer number of periods from 0, so
    // the element index modulo k locates the point inside its period.
    const int local = ((q.ex % k) + k) % k;
    return {q.px, (local + q.xi) / k, q.py / eps};
  };
}

TensorField conductivity(const CoefficientProblem& p, CoordinateMap map) {
  return [&p, map = std::move(map)](const QuadPoint& q) {
    const auto c = map(q);
    return p.a(c[0], c[1], c[2]);
  };
}

ScalarField weight(const CoefficientProblem& p, CoordinateMap map) {
  return [&p, map = std::move(map)](const QuadPoint& q) {
    const auto c = map(q);
    return p.weight(c[0], c[1], c[2]);
  };
}

Reduction::Reduction(int full_dim, const std::vector<int>& fixed) : full_dim_(full_dim) {
  std::vector<char> is_fixed(full_dim, 0);
  for (const int d : fixed) {
    if (d < 0 || d >= full_dim) throw Error(ErrorKind::kInvalidArgument, "Dirichlet DOF out of range");
    is_fixed[d] = 1;
  }
  for (int i = 0; i < full_dim; ++i) {
    if (!is_fixed[i]) free_.push_back(i);
  }
  if (free_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "eliminating every DOF leaves a 0-dimensional system");
  }
}

Vec Reduction::restrict_vector(const Vec& full) const {
  Vec r(reduced_dim());
  for (int i = 0; i < reduced_dim(); ++i) r[i] = full[free_[i]];
  return r;
}

Vec Reduction::prolong(const Vec& reduced) const {
  Vec f = Vec::Zero(full_dim_);
  for (int i = 0; i < reduced_dim(); ++i) f[free_[i]] = reduced[i];
  return f;
}

SparseSym Reduction::apply(const SparseSym& full) const {
  std::vector<int> map(full_dim_, -1);
  for (int i = 0; i < reduced_dim(); ++i) map[free_[i]] = i;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(full.nonZeros());
  for (int k = 0; k < full.outerSize(); ++k) {
    if (map[k] < 0) continue;
    for (SparseSym::InnerIterator it(full, k); it; ++it) {
      if (map[it.row()] >= 0) trips.emplace_back(map[it.row()], map[k], it.value());
    }
  }
  SparseSym r(reduced_dim(), reduced_dim());
  r.setFromTriplets(trips.begin(), trips.end());
  r.makeCompressed();
  return r;
}

SparseSym apply_dirichlet(const SparseSym& m, const Reduction& r) { return r.apply(m); }

}  // namespace thinspec
