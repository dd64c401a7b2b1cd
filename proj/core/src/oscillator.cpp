#include "thinspec/oscillator.hpp"

#include <cmath>
#include <numbers>

#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"

namespace thinspec {
namespace {

struct FemPair {
  std::vector<double> nu;
  Vec nodes;
  Mat vectors;
  Mat gram;
};

FemPair fem_1d(const OscillatorSpec& s, double l, int n, int k) {
  const double h = 2.0 * l / n;
  const int dim = n - 1;
  const double q = 0.5 * s.mu2;
  // Three-point Gauss on each element integrates z^2 phi_i phi_j exactly.
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  std::vector<Eigen::Triplet<double>> kt;
  std::vector<Eigen::Triplet<double>> mt;
  for (int e = 0; e < n; ++e) {
    const double z0 = -l + e * h;
    double ke[2][2] = {{s.a_eff / h, -s.a_eff / h}, {-s.a_eff / h, s.a_eff / h}};
    double me[2][2] = {};
    for (int g = 0; g < 3; ++g) {
      const double t = 0.5 * (gx[g] + 1.0);
      const double z = z0 + t * h;
      const double w = 0.5 * gw[g] * h;
      const double phi[2] = {1.0 - t, t};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          ke[a][b] += (q * z * z + s.c_eff) * phi[a] * phi[b] * w;
          me[a][b] += s.rho_avg * phi[a] * phi[b] * w;
        }
      }
    }
    const int dofs[2] = {e - 1, e};  // node e has DOF e - 1; nodes 0 and n are fixed
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (dofs[a] < 0 || dofs[a] >= dim || dofs[b] < 0 || dofs[b] >= dim) continue;
        kt.emplace_back(dofs[a], dofs[b], ke[a][b]);
        mt.emplace_back(dofs[a], dofs[b], me[a][b]);
      }
    }
  }
  SparseSym kmat(dim, dim);
  SparseSym mmat(dim, dim);
  kmat.setFromTriplets(kt.begin(), kt.end());
  mmat.setFromTriplets(mt.begin(), mt.end());

  // Eigenvalue errors scale with the squared residual, so 1e-9 leaves them
  // at round-off; much tighter is out of reach once ||A|| ~ a_eff / h^2 is large.
  SolverOptions opt;
  opt.tol = 1e-9;
  const EigResult r = smallest_eigs(kmat, mmat, k, opt);

  FemPair out;
  out.nu.assign(r.values.data(), r.values.data() + k);
  out.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) out.nodes[i] = -l + i * h;
  out.vectors = Mat::Zero(n + 1, k);
  // Vectors are M-orthonormal, i.e. rho_avg ||w||^2 = 1; rescale to unit L2.
  const double unit = std::sqrt(s.rho_avg);
  out.vectors.block(1, 0, dim, k) = r.vectors * unit;
  const Mat interior = out.vectors.block(1, 0, dim, k);
  out.gram = interior.transpose() * (mmat * interior);
  return out;
}

}  // namespace

void OscillatorSpec::validate() const {
  if (!(a_eff > 0.0) || !(mu2 > 0.0) || !(rho_avg > 0.0) || !std::isfinite(c_eff)) {
    throw Error(ErrorKind::kInvalidArgument,
                "oscillator spec needs a_eff > 0, mu2 > 0, rho_avg > 0 and finite c_eff");
  }
}

double nu_closed_form(const OscillatorSpec& s, int j) {
  if (j < 1) throw Error(ErrorKind::kInvalidArgument, "oscillator index starts at 1");
  return (s.c_eff + (2.0 * j - 1.0) * std::sqrt(s.a_eff * s.mu2 / 2.0)) / s.rho_avg;
}

double hermite(int j, double x) {
  if (j < 1 || j > kMaxHermiteIndex) {
    throw Error(ErrorKind::kInvalidArgument,
                "Hermite index must be in [1, " + std::to_string(kMaxHermiteIndex) + "]");
  }
  double prev = 1.0;
  if (j == 1) return prev;
  double cur = -2.0 * x;
  for (int i = 2; i < j; ++i) {
    const double next = -2.0 * x * cur - 2.0 * (i - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eigenfunction_w(const OscillatorSpec& s, int j, double z) {
  const double th = s.theta();
  return hermite(j, std::pow(th, 0.25) * z) * std::exp(-std::sqrt(th) * z * z / 2.0);
}

double eigenfunction_norm(const OscillatorSpec& s, int j) {
  double factorial = 1.0;
  for (int i = 2; i < j; ++i) factorial *= i;
  return std::sqrt(std::sqrt(std::numbers::pi) * std::ldexp(1.0, j - 1) * factorial /
                   std::pow(s.theta(), 0.25));
}

double eigenfunction_unit(const OscillatorSpec& s, int j, double z) {
  return eigenfunction_w(s, j, z) / eigenfunction_norm(s, j);
}

double default_truncation(const OscillatorSpec& s) {
  return std::max(8.0, 6.0 / std::pow(s.theta(), 0.25));
}

TruncatedSolution solve_truncated(const OscillatorSpec& s, double half_width, int n, int k) {
  s.validate();
  if (!(half_width > 0.0)) throw Error(ErrorKind::kInvalidArgument, "truncation half-width must be positive");
  if (n < 200) throw Error(ErrorKind::kInvalidArgument, "truncated solver needs n >= 200 elements");
  if (k < 1 || k >= n / 2) throw Error(ErrorKind::kInvalidArgument, "invalid eigenvalue count");

  double l = half_width;
  while (std::exp(-std::sqrt(s.theta()) * l * l) > 1e-10) l *= 1.25;

  const FemPair coarse = fem_1d(s, l, n, k);
  const FemPair fine = fem_1d(s, l, 2 * n, k);

  TruncatedSolution out;
  out.half_width = l;
  out.n = n;
  out.nu_coarse = coarse.nu;
  out.nu_fine = fine.nu;
  for (int j = 0; j < k; ++j) out.nu.push_back((4.0 * fine.nu[j] - coarse.nu[j]) / 3.0);
  out.nodes = coarse.nodes;
  out.vectors = coarse.vectors;
  out.gram = coarse.gram;
  return out;
}

int sign_changes(const Vec& v, double tol) {
  const double cutoff = tol * v.cwiseAbs().maxCoeff();
  int changes = 0;
  int last = 0;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= cutoff) continue;
    const int sgn = v[i] > 0 ? 1 : -1;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

}  // namespace thinspec
