#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thinspec/assembly.hpp"
#include "thinspec/cell.hpp"
#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/lanczos.hpp"

using namespace thinspec;

namespace {

const double kPi = std::numbers::pi;

SparseSym from_dense(const Mat& d) { return d.sparseView(); }

SparseSym diag(std::initializer_list<double> v) {
  Vec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d[i++] = x;
  return from_dense(d.asDiagonal().toDenseMatrix());
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

CellOperators cell_ops(const char* rho, int n) {
  return assemble_cell(make_scalar_problem("t", "1", rho), 0.0, make_cell_grid(n, n));
}

}  // namespace

TEST(Cholesky, Scalar) {
  const Cholesky c(diag({4.0}));
  EXPECT_DOUBLE_EQ(c.solve(Vec::Constant(1, 8.0))[0], 2.0);
}

TEST(Cholesky, TridiagonalMatchesDenseSolve) {
  Mat t = Mat::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    t(i, i) = 2;
    if (i) t(i, i - 1) = t(i - 1, i) = -1;
  }
  const Vec rhs = Vec::Unit(5, 0);
  const Vec x = Cholesky(from_dense(t)).solve(rhs);
  const Vec ref = t.llt().solve(rhs);
  EXPECT_LE((x - ref).norm(), 1e-12 * ref.norm());
  // forward/backward compose to the inverse
  const Cholesky c(from_dense(t));
  EXPECT_LE((c.backward(c.forward(rhs)) - ref).norm(), 1e-12);
}

TEST(Cholesky, ZeroRowIsNotSpd) {
  Mat t = Mat::Identity(3, 3);
  t(1, 1) = 0.0;
  EXPECT_EQ(kind_of([&] { Cholesky c(from_dense(t)); }), ErrorKind::kNotSPD);
}

TEST(SmallestEigs, CellLaplacianSpectrum) {
  const Grid g = make_cell_grid(32, 32);
  const SparseSym a = assemble_stiffness(g, [](const QuadPoint&) { return Sym2{1, 0, 1}; });
  const SparseSym m = assemble_mass(g);
  const EigResult r = smallest_eigs(a, m, 5);
  const auto exact = oracle::cell_laplacian_eigs(5);
  EXPECT_NEAR(r.values[0], 0.0, 1e-9);
  for (int i = 1; i < 5; ++i) EXPECT_NEAR(r.values[i], exact[i], 5e-3 * exact[i]) << i;
  // lambda_3 = (2 pi)^2 has multiplicity three: two y1 modes and one y2 mode.
  EXPECT_NEAR(exact[2], 4 * kPi * kPi, 1e-12);
  EXPECT_NEAR(exact[4], 4 * kPi * kPi, 1e-12);
  const Mat gram = r.vectors.transpose() * (m * r.vectors);
  EXPECT_LE((gram - Mat::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  for (int i = 0; i < 5; ++i) EXPECT_LE(r.residuals[i], 1e-10);
}

TEST(SmallestEigs, MatchesDenseOracle) {
  const Grid g = make_cell_grid(16, 12);
  const auto p = builtin_problem("P_LOC");
  const SparseSym a = assemble_stiffness(g, conductivity(p, cell_coordinates(0.3)));
  const SparseSym m = assemble_mass(g);
  const EigResult r = smallest_eigs(a, m, 6);
  const auto d = oracle::dense_eigs(a, m);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.values[i], d[i], 1e-8 * std::max(1.0, d[i])) << i;
}

TEST(SmallestEigs, TrivialPencils) {
  const Grid g = make_cell_grid(6, 4);
  const SparseSym m = assemble_mass(g);
  const EigResult same = smallest_eigs(m, m, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(same.values[i], 1.0, 1e-10);

  const EigResult d = smallest_eigs(diag({1, 2, 3, 4, 5}), diag({1, 1, 1, 1, 1}), 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.values[i], i + 1.0, 1e-10);
}

TEST(SmallestEigs, GershgorinShiftMakesPencilDefinite) {
  const SparseSym a = diag({-3.0, 1.0, 2.0});
  const SparseSym m = diag({1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(gershgorin_shift(a, m), 4.0);
  const EigResult r = smallest_eigs(a, m, 2);
  EXPECT_NEAR(r.values[0], -3.0, 1e-10);
  EXPECT_NEAR(r.values[1], 1.0, 1e-10);
}

TEST(Alpha1, ZeroShiftGivesConstantKernel) {
  const CellOperators c = cell_ops("cos(2*pi*y1) - 0.5", 16);
  const Alpha1 r = alpha1({c.a, c.b, c.m}, 0.0);
  EXPECT_NEAR(r.alpha, 0.0, 1e-10);
  const Vec psi = r.psi / r.psi.mean();
  EXPECT_LE((psi - Vec::Ones(psi.size())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Alpha1, SmallShiftIsPositiveAndMatchesDense) {
  const CellOperators c = cell_ops("cos(2*pi*y1) - 0.5", 12);
  const Alpha1 r = alpha1({c.a, c.b, c.m}, 0.1);
  EXPECT_GT(r.alpha, 0.0);
  EXPECT_NEAR(r.alpha, oracle::dense_alpha1(Mat(c.a), Mat(c.b), Mat(c.m), 0.1), 1e-10);
}

TEST(Alpha1, NegativeWeightBoundsBelow) {
  const CellOperators c = cell_ops("-1", 12);
  const Alpha1 r = alpha1({c.a, c.b, c.m}, 1.0);
  const EigResult shifted = smallest_eigs(SparseSym(c.a + c.m), c.m, 1);
  EXPECT_GE(r.alpha, shifted.values[0] - 1e-10);
  EXPECT_GT(r.alpha, 0.0);
}

TEST(Alpha1, SlopeAtZeroAndConcavity) {
  const CellOperators c = cell_ops("cos(2*pi*y1) - 0.5", 16);
  const PencilSpec p{c.a, c.b, c.m};
  const Vec ones = Vec::Ones(c.a.rows());
  const double h = 1e-4;
  const double slope = (alpha1(p, h).alpha - alpha1(p, 0.0).alpha) / h;
  const double expected = -quad(c.b, ones) / quad(c.m, ones);
  EXPECT_NEAR(slope, expected, 1e-3 * std::abs(expected));

  const double mu1 = principal_positive(p).mu;
  const std::vector<double> mus = {0.0, 0.5 * mu1, mu1, 1.5 * mu1};
  std::vector<double> al;
  for (double mu : mus) al.push_back(alpha1(p, mu).alpha);
  for (std::size_t i = 1; i + 1 < mus.size(); ++i) {
    const double chord = 0.5 * (al[i - 1] + al[i + 1]);
    EXPECT_GE(al[i], chord - 1e-8);
  }
}

TEST(Principal, MatchesDenseSweepRoot) {
  const CellOperators c = cell_ops("cos(2*pi*y1) - 0.5", 12);
  const PrincipalPair r = principal_positive({c.a, c.b, c.m});
  const double ref = oracle::dense_principal_mu(c.a, c.b, c.m);
  EXPECT_NEAR(r.mu, ref, 1e-8 * ref);
  EXPECT_LE(std::abs(r.alpha), 1e-10 * (1 + r.mu));
  EXPECT_NEAR(quad(c.b, r.psi), 1.0, 1e-10);
  EXPECT_GT(r.psi.minCoeff(), 0.0);
  const double rayleigh = quad(c.a, r.psi);
  EXPECT_LE(std::abs(rayleigh - r.mu * quad(c.b, r.psi)), 1e-8 * rayleigh);
}

TEST(Principal, RejectsNonnegativeAverage) {
  const CellOperators pos = cell_ops("cos(2*pi*y1) + 0.5", 12);
  EXPECT_EQ(kind_of([&] { principal_positive({pos.a, pos.b, pos.m}); }), ErrorKind::kNoPositivePrincipal);
  const CellOperators neg = cell_ops("-1", 12);
  EXPECT_EQ(kind_of([&] { principal_positive({neg.a, neg.b, neg.m}); }), ErrorKind::kNoPositivePrincipal);
}

TEST(Positive, DiagonalCases) {
  const SparseSym id2 = diag({1.0, 1.0});
  PositiveOptions opt;
  opt.k = 2;
  const EigResult r = positive_pencil_spectrum(id2, diag({2.0, 1.0}), opt);
  EXPECT_NEAR(r.values[0], 0.5, 1e-12);
  EXPECT_NEAR(r.values[1], 1.0, 1e-12);

  opt.k = 1;
  const EigResult s = positive_pencil_spectrum(id2, diag({1.0, -1.0}), opt);
  EXPECT_NEAR(s.values[0], 1.0, 1e-12);

  opt.k = 2;
  try {
    positive_pencil_spectrum(id2, diag({1.0, -1.0}), opt);
    FAIL();
  } catch (const PartialSpectrumError& e) {
    EXPECT_EQ(e.found(), 1);
  }
}

TEST(Positive, RodMatchesDenseOracle) {
  RodPolicy policy;
  policy.per_period = 8;
  for (const char* name : {"P_CONST", "P_LOC", "P_SHIFT"}) {
    const RodPencil rod = assemble_rod(builtin_problem(name), 0.25, policy);
    ASSERT_LE(rod.reduction.reduced_dim(), kDenseLimit);
    PositiveOptions opt;
    opt.k = 3;
    const EigResult sparse = positive_pencil_spectrum(rod.a, rod.b, opt);
    opt.sigma = 0.9 * sparse.values[0];
    const EigResult shifted = positive_pencil_spectrum(rod.a, rod.b, opt);
    const auto dense = oracle::dense_positive_eigs(rod.a, rod.b);
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(sparse.values[j], dense[j], 1e-8 * dense[j]) << name << " j=" << j;
      EXPECT_NEAR(shifted.values[j], dense[j], 1e-8 * dense[j]) << name << " j=" << j;
      EXPECT_LE(sparse.residuals[j], 1e-10);
    }
    // the library's own dense path agrees with the independent one
    const Vec lib = dense_positive_branch(rod.a, rod.b);
    EXPECT_NEAR(lib[0], dense[0], 1e-10 * dense[0]);
  }
}

TEST(Positive, NegativeBranchExists) {
  RodPolicy policy;
  policy.per_period = 8;
  const RodPencil rod = assemble_rod(builtin_problem("P_LOC"), 0.25, policy);
  const auto neg = negative_branch_probe(rod.a, rod.b);
  ASSERT_TRUE(neg.has_value());
  EXPECT_LT(*neg, 0.0);
  const Mat a(rod.a);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(rod.b), a, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(*neg, 1.0 / es.eigenvalues()(0), 1e-8 * std::abs(*neg));
}

TEST(DenseOracle, SizeLimit) {
  const Grid g = make_cell_grid(64, 64);
  const SparseSym m = assemble_mass(g);
  EXPECT_EQ(kind_of([&] { dense_oracle(m, m); }), ErrorKind::kSizeExceeded);
}

TEST(Lanczos, ReproducibleForFixedSeed) {
  const CellOperators c = cell_ops("cos(2*pi*y1) - 0.5", 16);
  const EigResult a = smallest_eigs(c.a, c.m, 3);
  const EigResult b = smallest_eigs(c.a, c.m, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}
