#include "thinspec/eigensolvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "thinspec/errors.hpp"
#include "thinspec/lanczos.hpp"

namespace thinspec {
namespace {

void require_square(const SparseSym& s, int n, const char* what) {
  if (s.rows() != n || s.cols() != n) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " has mismatched dimensions");
  }
}

double max_column_sum(const SparseSym& s) {
  double best = 0.0;
  for (int k = 0; k < s.outerSize(); ++k) {
    double sum = 0.0;
    for (SparseSym::InnerIterator it(s, k); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

std::string fmt_e(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void apply_columns(const std::function<Vec(const Vec&)>& f, const Mat& v, Mat& out) {
  out.resize(v.rows(), v.cols());
  for (int j = 0; j < v.cols(); ++j) out.col(j) = f(v.col(j));
}

// Rayleigh-Ritz for (A, M) on span(V): returns ascending values and M-orthonormal vectors.
void rayleigh_ritz(const SparseSym& a, const SparseSym& m, Mat& v, Vec& values) {
  const Mat h = v.transpose() * (a * v);
  const Mat g = v.transpose() * (m * v);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()), 0.5 * (g + g.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::kNotConverged, "Rayleigh-Ritz step failed");
  values = es.eigenvalues();
  v = v * es.eigenvectors();
}

void fix_sign(Vec& v, const SparseSym* m) {
  const double mean = m ? (*m * v).sum() : v.sum();
  if (mean < 0.0) v = -v;
}

}  // namespace

Cholesky::Cholesky(const SparseSym& s) : dim_(static_cast<int>(s.rows())) {
  if (s.rows() != s.cols() || dim_ == 0) {
    throw Error(ErrorKind::kInvalidArgument, "Cholesky needs a nonempty square matrix");
  }
  llt_ = std::make_shared<Eigen::SimplicialLLT<SparseSym, Eigen::Lower, Eigen::AMDOrdering<int>>>();
  llt_->compute(s);
  if (llt_->info() != Eigen::Success) {
    throw Error(ErrorKind::kNotSPD, "matrix is not positive definite (non-positive pivot)");
  }
}

Vec Cholesky::solve(const Vec& b) const { return llt_->solve(b); }

Vec Cholesky::forward(const Vec& x) const {
  Vec y = llt_->permutationP() * x;
  llt_->matrixL().solveInPlace(y);
  return y;
}

Vec Cholesky::backward(const Vec& x) const {
  Vec y = x;
  llt_->matrixU().solveInPlace(y);
  return llt_->permutationPinv() * y;
}

double gershgorin_shift(const SparseSym& a, const SparseSym& m) {
  const int n = static_cast<int>(a.rows());
  Vec diag = Vec::Zero(n);
  Vec off = Vec::Zero(n);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(a, k); it; ++it) {
      if (it.row() == k) {
        diag[k] += it.value();
      } else {
        off[k] += std::abs(it.value());
      }
    }
  }
  const Vec lumped = m * Vec::Ones(n);
  double lowest = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = lumped[i] > 0.0 ? lumped[i] : 1.0;
    lowest = std::min(lowest, (diag[i] - off[i]) / w);
  }
  return 1.0 + std::abs(lowest);
}

EigResult smallest_eigs(const SparseSym& a, const SparseSym& m, int k, const SolverOptions& opt) {
  const int n = static_cast<int>(a.rows());
  require_square(a, n, "A");
  require_square(m, n, "M");
  if (k < 1 || k > n) throw Error(ErrorKind::kInvalidArgument, "smallest_eigs: need 1 <= k <= n");

  double sigma = gershgorin_shift(a, m);
  std::unique_ptr<Cholesky> chol;
  for (int attempt = 0; attempt < 40 && !chol; ++attempt) {
    try {
      chol = std::make_unique<Cholesky>(SparseSym(a + sigma * m));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNotSPD) throw;
      sigma *= 2.0;
    }
  }
  if (!chol) throw Error(ErrorKind::kNotSPD, "no SPD shift found for A + sigma M");
  const Cholesky mchol(m);

  const auto shift_invert = [&](const Vec& x) { return chol->solve(m * x); };
  LanczosOptions lo;
  lo.nev = k;
  lo.largest = true;
  lo.max_iter = opt.max_iter;
  lo.seed = opt.seed;
  lo.probe_multiplicity = opt.probe_multiplicity;
  lo.start = opt.start;
  const LanczosResult lr = lanczos([&](const Vec& x, Vec& y) { y = shift_invert(x); }, &m, n, lo);

  EigResult out;
  out.iterations = lr.iterations;
  out.shift = sigma;
  Mat v = lr.vectors;
  if (v.cols() < k) {
    throw NotConvergedError("smallest_eigs found only " + std::to_string(v.cols()) + " of " +
                                std::to_string(k) + " pairs",
                            std::numeric_limits<double>::infinity());
  }

  const auto residuals = [&](const Vec& values, const Mat& vecs) {
    Vec r(values.size());
    for (int j = 0; j < values.size(); ++j) {
      const Vec x = vecs.col(j);
      const Vec res = a * x - values[j] * (m * x);
      const double xm = std::sqrt(x.dot(m * x));
      r[j] = std::sqrt(std::max(0.0, res.dot(mchol.solve(res)))) / ((1.0 + std::abs(values[j])) * xm);
    }
    return r;
  };

  Vec values;
  rayleigh_ritz(a, m, v, values);
  Vec res = residuals(values, v);
  // Block inverse iteration, first with the Lanczos factorization. A
  // pessimistic Gershgorin shift clusters the shifted spectrum and slows this
  // down, so after two sweeps switch to a shift just below the computed
  // lambda_1, which keeps A + sigma M SPD.
  std::unique_ptr<Cholesky> near;
  for (int refine = 0; refine < 8 && res.maxCoeff() > opt.tol; ++refine) {
    if (refine == 2) {
      const double sigma2 = -values[0] + 1.0 + 1e-6 * std::abs(values[0]);
      if (sigma2 < sigma) {
        try {
          near = std::make_unique<Cholesky>(SparseSym(a + sigma2 * m));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kNotSPD) throw;
        }
      }
    }
    Mat next;
    apply_columns([&](const Vec& x) -> Vec { return near ? near->solve(m * x) : shift_invert(x); }, v, next);
    v = next;
    rayleigh_ritz(a, m, v, values);
    res = residuals(values, v);
  }
  if (!(res.maxCoeff() <= opt.tol)) {
    throw NotConvergedError("smallest_eigs residual " + fmt_e(res.maxCoeff()) +
                                " above tolerance",
                            res.maxCoeff());
  }
  for (int j = 0; j < v.cols(); ++j) {
    Vec col = v.col(j);
    col /= std::sqrt(col.dot(m * col));
    fix_sign(col, &m);
    v.col(j) = col;
  }
  out.values = values;
  out.vectors = v;
  out.residuals = res;
  return out;
}

Alpha1 alpha1(const PencilSpec& p, double mu, const SolverOptions& opt) {
  const SparseSym k = p.a - mu * p.b;
  SolverOptions o = opt;
  o.probe_multiplicity = false;
  const EigResult r = smallest_eigs(k, p.m, 1, o);
  Alpha1 out;
  out.alpha = r.values[0];
  out.psi = r.vectors.col(0);
  out.residual = r.residuals[0];
  out.iterations = r.iterations;
  return out;
}

PrincipalPair principal_positive(const PencilSpec& p, const PrincipalOptions& opt) {
  const int n = static_cast<int>(p.a.rows());
  require_square(p.b, n, "B");
  require_square(p.m, n, "M");
  const Vec ones = Vec::Ones(n);
  const double total = ones.dot(p.b * ones);
  if (total >= 0.0) {
    throw Error(ErrorKind::kNoPositivePrincipal,
                "weight average is nonnegative (1^T B 1 = " + std::to_string(total) +
                    "); mu = 0 is the only nonnegative principal eigenvalue");
  }
  if (p.b.diagonal().maxCoeff() <= 0.0) {
    throw Error(ErrorKind::kNoPositivePrincipal, "weight has no positive part on the mesh");
  }

  PrincipalPair out;
  SolverOptions eig = opt.eig;
  Vec warm;
  const auto evaluate = [&](double mu) {
    eig.start = warm.size() == n ? &warm : nullptr;
    Alpha1 r = alpha1(p, mu, eig);
    warm = r.psi;
    return r;
  };

  double lo = 0.0;
  double mu = 1.0;
  Alpha1 r = evaluate(mu);
  while (r.alpha >= 0.0) {
    lo = mu;
    mu *= 2.0;
    ++out.bracket_steps;
    if (mu > opt.mu_max) {
      throw Error(ErrorKind::kUnbracketable,
                  "alpha1 stays positive up to mu = " + std::to_string(opt.mu_max) +
                      "; the weight is nearly nonnegative on the mesh");
    }
    r = evaluate(mu);
  }
  double hi = mu;

  // alpha1 is concave, so Newton started right of the root stays right of it.
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double slope = -r.psi.dot(p.b * r.psi) / r.psi.dot(p.m * r.psi);
    double next = slope < 0.0 ? mu - r.alpha / slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
      ++out.bisection_steps;
    } else {
      ++out.newton_steps;
    }
    const double step = std::abs(next - mu);
    mu = next;
    r = evaluate(mu);
    if (r.alpha < 0.0) {
      hi = mu;
    } else {
      lo = mu;
    }
    if (step <= opt.rel_tol * mu && std::abs(r.alpha) <= 1e-10 * (1.0 + mu)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NotConvergedError("principal eigenvalue iteration did not converge", std::abs(r.alpha));
  }

  Vec psi = r.psi;
  const double norm = psi.dot(p.b * psi);
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::kInvalidPrincipal,
                "principal eigenvector has non-positive weighted norm; wrong root");
  }
  psi /= std::sqrt(norm);
  fix_sign(psi, &p.m);

  out.mu = mu;
  out.psi = std::move(psi);
  out.alpha = r.alpha;
  out.residual = r.residual;
  return out;
}

EigResult positive_pencil_spectrum(const SparseSym& a, const SparseSym& b, const PositiveOptions& opt) {
  const int n = static_cast<int>(a.rows());
  require_square(a, n, "A");
  require_square(b, n, "B");
  if (opt.k < 1 || opt.k > n) throw Error(ErrorKind::kInvalidArgument, "positive spectrum: need 1 <= k <= n");

  double sigma = std::max(0.0, opt.sigma);
  std::unique_ptr<Cholesky> chol;
  for (int attempt = 0; !chol; ++attempt) {
    try {
      chol = std::make_unique<Cholesky>(sigma > 0.0 ? SparseSym(a - sigma * b) : a);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNotSPD || sigma == 0.0) throw;
      sigma = attempt < 8 ? 0.5 * sigma : 0.0;
    }
  }
  const SparseSym k_sigma = sigma > 0.0 ? SparseSym(a - sigma * b) : a;

  LanczosOptions lo;
  lo.nev = opt.k;
  lo.largest = true;
  lo.max_iter = opt.max_iter;
  lo.seed = opt.seed;
  lo.probe_multiplicity = opt.probe_multiplicity;
  const LanczosResult lr = lanczos(
      [&](const Vec& x, Vec& y) { y = chol->forward(b * chol->backward(x)); }, nullptr, n, lo);

  int positive = 0;
  for (int j = 0; j < lr.values.size(); ++j) {
    if (lr.values[j] > 0.0) ++positive;
  }
  if (positive < opt.k) {
    throw PartialSpectrumError("found " + std::to_string(positive) + " of " +
                                   std::to_string(opt.k) + " positive eigenvalues",
                               positive);
  }

  Mat u(n, opt.k);
  for (int j = 0; j < opt.k; ++j) u.col(j) = chol->backward(lr.vectors.col(j));

  const double a_norm = max_column_sum(a);
  const double b_norm = max_column_sum(b);
  Vec lambda;
  const auto ritz = [&] {
    const Mat h = u.transpose() * (b * u);
    const Mat g = u.transpose() * (k_sigma * u);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()), 0.5 * (g + g.transpose()));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::kNotConverged, "Rayleigh-Ritz step failed");
    // Largest theta first gives ascending lambda.
    const Vec theta = es.eigenvalues().reverse();
    const Mat s = es.eigenvectors().rowwise().reverse();
    u = u * s;
    lambda.resize(opt.k);
    for (int j = 0; j < opt.k; ++j) {
      if (!(theta[j] > 0.0)) throw PartialSpectrumError("positive Ritz value lost in refinement", j);
      lambda[j] = sigma + 1.0 / theta[j];
    }
  };
  const auto residuals = [&] {
    Vec r(opt.k);
    for (int j = 0; j < opt.k; ++j) {
      const Vec x = u.col(j);
      r[j] = (a * x - lambda[j] * (b * x)).norm() / ((a_norm + std::abs(lambda[j]) * b_norm) * x.norm());
    }
    return r;
  };

  ritz();
  Vec res = residuals();
  for (int refine = 0; refine < 6 && res.maxCoeff() > opt.tol; ++refine) {
    for (int j = 0; j < opt.k; ++j) u.col(j) = chol->backward(chol->forward(b * u.col(j)));
    ritz();
    res = residuals();
  }
  if (!(res.maxCoeff() <= opt.tol)) {
    throw NotConvergedError("positive spectrum residual " + fmt_e(res.maxCoeff()) +
                                " above tolerance",
                            res.maxCoeff());
  }
  for (int j = 0; j < opt.k; ++j) {
    Vec col = u.col(j);
    col.normalize();
    fix_sign(col, nullptr);
    u.col(j) = col;
  }

  EigResult out;
  out.values = lambda;
  out.vectors = u;
  out.residuals = res;
  out.iterations = lr.iterations;
  out.shift = sigma;
  return out;
}

std::optional<double> negative_branch_probe(const SparseSym& a, const SparseSym& b, std::uint64_t seed) {
  const int n = static_cast<int>(a.rows());
  const Cholesky chol(a);
  LanczosOptions lo;
  lo.nev = 1;
  lo.largest = false;
  lo.max_iter = 300;
  lo.seed = seed;
  lo.probe_multiplicity = false;
  const LanczosResult lr = lanczos(
      [&](const Vec& x, Vec& y) { y = chol.forward(b * chol.backward(x)); }, nullptr, n, lo);
  if (lr.values.size() == 0 || !(lr.values[0] < 0.0)) return std::nullopt;
  return 1.0 / lr.values[0];
}

DenseSpectrum dense_oracle(const SparseSym& a, const SparseSym& m) {
  const int n = static_cast<int>(a.rows());
  require_square(m, n, "M");
  if (n > kDenseLimit) {
    throw Error(ErrorKind::kSizeExceeded,
                "dense oracle limited to " + std::to_string(kDenseLimit) + " unknowns, got " +
                    std::to_string(n));
  }
  const Mat ad(a);
  const Mat md(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ad, md);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::kNotSPD, "dense oracle: M not SPD");
  return {es.eigenvalues(), es.eigenvectors()};
}

Vec dense_positive_branch(const SparseSym& a, const SparseSym& b) {
  const DenseSpectrum s = dense_oracle(b, a);
  const double scale = s.values.cwiseAbs().maxCoeff();
  std::vector<double> lambda;
  for (int i = 0; i < s.values.size(); ++i) {
    if (s.values[i] > 1e-14 * scale) lambda.push_back(1.0 / s.values[i]);
  }
  std::sort(lambda.begin(), lambda.end());
  return Eigen::Map<Vec>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
}

}  // namespace thinspec
