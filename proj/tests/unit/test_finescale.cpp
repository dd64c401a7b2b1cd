#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "oracles.hpp"
#include "thinspec/eigensolvers.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/report.hpp"

using namespace thinspec;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

// Rod and matched cell model for P_LOC at eps = 1/8 with the default
// resolution, shared by several tests.
struct LocFixture {
  CoefficientProblem p = builtin_problem("P_LOC");
  RodPolicy policy;
  RodPencil rod;
  EffectiveModel model;
  OscillatorSpec spec;
  SpectrumTable table;

  LocFixture() {
    rod = assemble_rod(p, 0.125, policy);
    EffectiveOptions opt;
    std::tie(opt.n1, opt.n2) = policy.cell_grid();
    model = build_effective_model(p, opt);
    spec = oscillator_spec(model);
    SpectrumOptions so;
    so.k = 3;
    so.sigma = 0.9 * model.mu0 / (0.125 * 0.125);
    table = positive_spectrum(rod, so);
  }
};

const LocFixture& loc() {
  static const LocFixture f;
  return f;
}

}  // namespace

TEST(Rod, DimensionsAndDefiniteness) {
  const RodPencil rod = assemble_rod(builtin_problem("P_LOC"), 0.25, RodPolicy{8, 0});
  EXPECT_EQ(rod.rod.m1, 64);
  EXPECT_EQ(rod.rod.m2, 8);
  EXPECT_EQ(rod.a.rows(), (64 - 1) * (8 + 1));
  EXPECT_EQ(rod.b.rows(), rod.a.rows());
  EXPECT_NO_THROW(Cholesky{rod.a});
  const Vec d = Vec(rod.b.diagonal());
  EXPECT_LT(d.minCoeff(), 0.0);
  EXPECT_GT(d.maxCoeff(), 0.0);
}

TEST(Rod, RejectsBadEpsilonAndCoarseGrids) {
  const auto p = builtin_problem("P_LOC");
  EXPECT_EQ(kind_of([&] { assemble_rod(p, 0.5, RodPolicy{}); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { assemble_rod(p, 0.3, RodPolicy{}); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { assemble_rod(p, 0.2, RodPolicy{}); }), ErrorKind::kInvalidArgument);
  try {
    assemble_rod(p, 0.125, RodPolicy{4, 0});
    FAIL();
  } catch (const UnderResolvedError& e) {
    EXPECT_EQ(e.required_m1(), 128);
  }
}

TEST(Rod, ParseEps) {
  EXPECT_DOUBLE_EQ(parse_eps("1/8"), 0.125);
  EXPECT_DOUBLE_EQ(parse_eps("0.0625"), 0.0625);
  EXPECT_THROW(parse_eps("1/2"), Error);
  EXPECT_THROW(parse_eps("1/7"), Error);
  EXPECT_THROW(parse_eps("abc"), Error);
  EXPECT_THROW(parse_eps("1/0"), Error);
}

TEST(Rod, PositiveSpectrumMatchesDense) {
  const RodPencil rod = assemble_rod(builtin_problem("P_SHIFT"), 0.25, RodPolicy{8, 0});
  const std::vector<double> dense = oracle::dense_positive_eigs(rod.a, rod.b);
  SpectrumOptions so;
  so.k = 3;
  for (double sigma : {0.0, 0.9 * 60.0 * 16.0}) {
    so.sigma = sigma;
    const SpectrumTable t = positive_spectrum(rod, so);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(t.lambda[j], dense[j], 1e-8 * dense[j]) << "sigma " << sigma;
    for (int j = 1; j < 3; ++j) EXPECT_GT(t.lambda[j], t.lambda[j - 1]);
  }
}

TEST(Rod, EigenvectorNormalizationAndOrthogonality) {
  const auto& f = loc();
  const double target = normalization_constant(NormalizationMode::kPaper, 0.125);
  EXPECT_DOUBLE_EQ(target, std::pow(0.125, 1.5));
  EXPECT_EQ(normalization_constant(NormalizationMode::kUnit, 0.125), 1.0);
  Mat u(f.rod.reduction.reduced_dim(), 3);
  for (int j = 0; j < 3; ++j) u.col(j) = f.rod.reduction.restrict_vector(f.table.u.col(j));
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(quad(f.rod.m, u.col(j)), target, 1e-12 * target);
    EXPECT_GT((f.rod.m * u.col(j)).sum(), 0.0);
  }
  const Mat gb = u.transpose() * (f.rod.b * u);
  const Mat ga = u.transpose() * (f.rod.a * u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(ga(i, i) / gb(i, i), f.table.lambda[i], 1e-9 * f.table.lambda[i]);
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      EXPECT_LE(std::abs(gb(i, j)), 1e-8 * std::sqrt(gb(i, i) * gb(j, j)));
      EXPECT_LE(std::abs(ga(i, j)), 1e-8 * std::sqrt(ga(i, i) * ga(j, j)));
    }
  }
}

TEST(Rod, MatchedCellGrid) {
  EXPECT_EQ(RodPolicy{}.cell_grid(), std::make_pair(24, 24));
  EXPECT_EQ((RodPolicy{8, 0}.cell_grid()), std::make_pair(16, 16));
  EXPECT_EQ((RodPolicy{12, 6}.cell_grid()), std::make_pair(24, 18));
}

TEST(Rod, MeshRefinementChangesLambdaLittle) {
  const auto& f = loc();
  const RodPencil fine = assemble_rod(f.p, 0.125, RodPolicy{2 * f.policy.per_period, 2 * f.policy.resolved_m2()});
  SpectrumOptions so;
  so.k = 1;
  so.sigma = 0.9 * f.model.mu0 / (0.125 * 0.125);
  const double l_fine = positive_spectrum(fine, so).lambda[0];
  EXPECT_LE(std::abs(l_fine - f.table.lambda[0]), 0.01 * l_fine);
}

TEST(Asymptotics, PredictedTwoTerm) {
  EffectiveModel m;
  m.mu0 = 1.0;
  OscillatorSpec s;  // nu_1 = 1
  EXPECT_NEAR(predicted(m, s, 0.1, 1), 110.0, 1e-12);
}

TEST(Factorization, ReferenceIsExact) {
  const auto& f = loc();
  const Vec r = reference_profile(f.rod, f.model, f.spec, 1);
  const FactorizationError e = factorization_error(f.rod, r, f.model, f.spec, 1);
  EXPECT_LE(e.relative, 1e-14);
  EXPECT_NEAR(e.fit, 1.0, 1e-12);
}

TEST(Factorization, WrongModeIsWorse) {
  const auto& f = loc();
  const Vec u1 = f.table.u.col(0);
  const double right = factorization_error(f.rod, u1, f.model, f.spec, 1).relative;
  const double wrong = factorization_error(f.rod, u1, f.model, f.spec, 2).relative;
  EXPECT_LT(right, wrong);
  EXPECT_LT(right, 0.5);
}

TEST(Localization, MonotoneAndComplete) {
  const auto& f = loc();
  const auto prof = localization_profile(f.rod, f.table.u.col(0));
  ASSERT_EQ(prof.size(), 6u);
  for (std::size_t i = 1; i < prof.size(); ++i) {
    EXPECT_GE(prof[i].first, prof[i - 1].first);
    EXPECT_GE(prof[i].second, prof[i - 1].second - 1e-15);
  }
  // At eps = 1/8 the windows 4 sqrt(eps) and 6 sqrt(eps) exceed the rod.
  int full = 0;
  for (const auto& [w, frac] : prof) {
    if (w >= 1.0) {
      EXPECT_NEAR(frac, 1.0, 1e-14) << "W = " << w;
      ++full;
    }
  }
  EXPECT_EQ(full, 3);
}

TEST(Averaging, ConstantWeightGivesZero) {
  const auto& f = loc();
  const double d = averaging_diagnostic(f.rod, f.table.u.col(0), f.p, [](double, double, double) { return 2.0; });
  EXPECT_EQ(d, 0.0);
  EXPECT_TRUE(std::isfinite(averaging_diagnostic(f.rod, f.table.u.col(0), f.p)));
}

TEST(Sweep, ReproducibleTables) {
  SweepOptions opt;
  opt.eps = {0.25, 0.125};
  opt.policy = RodPolicy{8, 0};
  const auto p = builtin_problem("P_LOC");
  const auto render = [&] {
    const ConvergenceReport r = sweep(p, opt);
    std::ostringstream os;
    for (const auto& [stem, table] : report::sweep_tables(r)) {
      os << stem << '\n';
      report::write_csv(os, table);
    }
    return os.str();
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  EXPECT_NE(a.find("eps,m1,m2,dofs,j,lambda"), std::string::npos);
}

TEST(Sweep, RowsOrderedAndConsistent) {
  SweepOptions opt;
  opt.eps = {0.125, 0.25};
  opt.policy = RodPolicy{8, 0};
  const ConvergenceReport r = sweep(builtin_problem("P_LOC"), opt);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].eps, 0.25);
  EXPECT_EQ(r.rows[1].eps, 0.125);
  for (const auto& row : r.rows) {
    ASSERT_EQ(row.lambda.size(), 2u);
    EXPECT_NEAR(row.first_error[0], row.eps * (row.lambda[0] - row.predicted[0]), 1e-9 * row.lambda[0]);
    EXPECT_TRUE(row.negative_eigenvalue.has_value());
    EXPECT_LT(*row.negative_eigenvalue, 0.0);
  }
}

TEST(Sweep, HypothesisFailureBeforeRodSolve) {
  SweepOptions opt;
  opt.eps = {0.125};
  try {
    sweep(builtin_problem("P_CONST"), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kH6Violated);
    EXPECT_EQ(std::string(e.what()).find("rod eps"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] {
              SweepOptions o;
              o.eps = {0.125};
              sweep(make_scalar_problem("t", "1", "cos(2*pi*y1) + 0.5"), o);
            }),
            ErrorKind::kHypothesisViolated);
}
