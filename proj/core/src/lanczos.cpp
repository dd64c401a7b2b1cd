#include "thinspec/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "thinspec/errors.hpp"

namespace thinspec {
namespace {

struct Locked {
  double value;
  double estimate;
  Vec v;
  Vec wv;
};

}  // namespace

LanczosResult lanczos(const LinearOp& op, const SparseSym* inner, int n,
                      const LanczosOptions& opt) {
  if (n <= 0 || opt.nev < 1 || opt.nev > n) {
    throw Error(ErrorKind::kInvalidArgument, "lanczos: need 1 <= nev <= n");
  }
  if (opt.start && opt.start->size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "lanczos: start vector has wrong size");
  }

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  const auto random_vector = [&] {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };
  const auto apply_w = [&](const Vec& x) -> Vec { return inner ? Vec(*inner * x) : x; };
  const auto w_norm = [&](const Vec& x) { return std::sqrt(std::max(0.0, x.dot(apply_w(x)))); };
  // True when a is further towards the wanted end than b.
  const auto more_wanted = [&](double a, double b) { return opt.largest ? a > b : a < b; };

  std::vector<Locked> locked;
  const auto orth_locked = [&](Vec& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Locked& l : locked) x -= l.wv.dot(x) * l.v;
    }
  };
  const auto sort_locked = [&] {
    std::stable_sort(locked.begin(), locked.end(),
                     [&](const Locked& a, const Locked& b) { return more_wanted(a.value, b.value); });
  };

  const int max_basis = opt.max_basis > 0 ? opt.max_basis : std::min(n, std::max(2 * opt.nev + 40, 160));

  LanczosResult result;
  std::vector<Locked> pending;  // unconverged approximations from the last cycle
  Vec start = opt.start ? *opt.start : random_vector();
  int probes_left = opt.probe_multiplicity ? 3 : 0;
  bool probing = false;
  double scale = 0.0;

  for (;;) {
    const int nlocked = static_cast<int>(locked.size());
    const int cap = std::min(max_basis, n - nlocked);
    if (cap <= 0 || result.iterations >= opt.max_iter) break;
    const int need = std::min(probing ? 1 : opt.nev - nlocked, cap);

    Vec q = start;
    orth_locked(q);
    double nq = w_norm(q);
    if (!(nq > 1e-10 * std::max(1.0, w_norm(start)))) {
      q = random_vector();
      orth_locked(q);
      nq = w_norm(q);
      if (!(nq > 0.0)) break;
    }
    q /= nq;

    Mat basis(n, cap);
    Mat wbasis;
    if (inner) wbasis.resize(n, cap);
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::SelfAdjointEigenSolver<Mat> tri;
    bool invariant = false;
    double normest = 0.0;
    int m = 0;
    Vec w;

    const auto wanted_index = [&](int t) { return opt.largest ? m - 1 - t : t; };
    const auto solve_tridiagonal = [&] {
      Vec d = Eigen::Map<const Vec>(alpha.data(), m);
      Vec e = m > 1 ? Vec(Eigen::Map<const Vec>(beta.data(), m - 1)) : Vec(Vec::Zero(0));
      tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      const Vec& th = tri.eigenvalues();
      scale = std::max({scale, std::abs(th[0]), std::abs(th[m - 1])});
    };

    for (int j = 0; j < cap; ++j) {
      basis.col(j) = q;
      if (inner) wbasis.col(j) = *inner * q;
      op(q, w);
      ++result.iterations;
      orth_locked(w);
      const double a = (inner ? wbasis.col(j) : basis.col(j)).dot(w);
      w -= a * basis.col(j);
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec c = (inner ? wbasis.leftCols(j + 1) : basis.leftCols(j + 1)).transpose() * w;
        w -= basis.leftCols(j + 1) * c;
      }
      orth_locked(w);
      const double b = w_norm(w);
      normest = std::max(normest, std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0));
      alpha.push_back(a);
      beta.push_back(b);
      m = j + 1;
      invariant = !(b > 1e-13 * normest);
      const bool last = m == cap || result.iterations >= opt.max_iter;
      if (m >= need && (m < 40 || m % 4 == 0 || last || invariant)) {
        solve_tridiagonal();
        bool all_converged = true;
        for (int t = 0; t < need && all_converged; ++t) {
          const double est = std::abs(b * tri.eigenvectors()(m - 1, wanted_index(t)));
          all_converged = est <= opt.tol * scale;
        }
        if (all_converged || invariant) break;
      }
      if (last) break;
      q = w / b;
    }

    solve_tridiagonal();
    const double b_last = beta.back();
    std::vector<Locked> fresh;
    pending.clear();
    Vec restart = Vec::Zero(n);
    for (int t = 0; t < std::min(need, m); ++t) {
      const int idx = wanted_index(t);
      const double est = invariant ? 0.0 : std::abs(b_last * tri.eigenvectors()(m - 1, idx));
      Vec y = basis.leftCols(m) * tri.eigenvectors().col(idx);
      const double value = tri.eigenvalues()[idx];
      if (est <= opt.tol * scale) {
        Vec wy = apply_w(y);
        fresh.push_back({value, est, std::move(y), std::move(wy)});
      } else {
        restart += y;
        Vec wy = apply_w(y);
        pending.push_back({value, est, std::move(y), std::move(wy)});
      }
    }

    if (probing) {
      if (fresh.empty()) break;
      // A probe only matters if it beats the least wanted locked value.
      const double worst = locked.back().value;
      if (!more_wanted(fresh.front().value, worst) ||
          std::abs(fresh.front().value - worst) <= 1e-9 * scale) {
        break;
      }
      locked.push_back(std::move(fresh.front()));
      sort_locked();
      if (static_cast<int>(locked.size()) > opt.nev) locked.pop_back();
      if (--probes_left <= 0) break;
      start = random_vector();
      continue;
    }

    for (Locked& l : fresh) locked.push_back(std::move(l));
    sort_locked();
    if (static_cast<int>(locked.size()) >= opt.nev) {
      pending.clear();
      if (probes_left > 0 && static_cast<int>(locked.size()) < n) {
        probing = true;
        start = random_vector();
        continue;
      }
      break;
    }
    start = restart.norm() > 0.0 ? restart : random_vector();
  }

  result.converged = static_cast<int>(locked.size()) >= opt.nev;
  std::vector<Locked> all = std::move(locked);
  for (Locked& p : pending) all.push_back(std::move(p));
  std::stable_sort(all.begin(), all.end(),
                   [&](const Locked& a, const Locked& b) { return more_wanted(a.value, b.value); });
  const int count = std::min<int>(opt.nev, static_cast<int>(all.size()));
  result.values.resize(count);
  result.vectors.resize(n, count);
  for (int i = 0; i < count; ++i) {
    result.values[i] = all[i].value;
    result.vectors.col(i) = all[i].v;
    result.worst_estimate = std::max(result.worst_estimate, all[i].estimate);
  }
  return result;
}

}  // namespace thinspec
