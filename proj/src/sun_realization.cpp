#include "twistred/sun_realization.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace twistred {

namespace {
const std::complex<double> im(0.0, 1.0);
}

SunRealization::SunRealization(const SimpleLieAlgebra& alg)
    : n_(alg.rank + 1), alg_(&alg) {
  if (alg.family != Family::A)
    throw ValidationError("SunRealization requires an A-family algebra");
  auto unit = [&](int i, int j) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
    m(i, j) = 1.0;
    return m;
  };
  std::vector<Eigen::MatrixXcd> xp(alg.npos), xm(alg.npos);
  std::vector<int> order(alg.npos);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return alg.roots.positive[a].sum() < alg.roots.positive[b].sum();
  });
  for (int p : order) {
    if (alg.roots.positive[p].sum() == 1) {
      int node = -1;
      for (int i = 0; i < alg.rank; ++i)
        if (alg.roots.positive[p][i] == 1) node = i;
      xp[p] = unit(node, node + 1);
      xm[p] = unit(node + 1, node);
      continue;
    }
    const auto& ch = alg.chains[p];
    int si = alg.simple_root_index(ch.simple_node);
    xp[p] = (xp[si] * xp[ch.lower] - xp[ch.lower] * xp[si]) / ch.coeff;
    double nminus = alg.nx(si + alg.npos, ch.lower + alg.npos);
    xm[p] = (xm[si] * xm[ch.lower] - xm[ch.lower] * xm[si]) / nminus;
  }
  basis_.resize(alg.dim);
  for (int j = 0; j < alg.rank; ++j) {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n_, n_);
    for (int k = 0; k < alg.rank; ++k)
      t += alg.cartan_orthobasis(j, k) * (unit(k, k) - unit(k + 1, k + 1));
    basis_[alg.t_index(j)] = im * t;
  }
  for (int p = 0; p < alg.npos; ++p) {
    basis_[alg.y_index(p)] = im * (xp[p] + xm[p]) / std::sqrt(2.0);
    basis_[alg.z_index(p)] = (xp[p] - xm[p]) / std::sqrt(2.0);
  }
  // cross-validate the embedding against the stored structure constants
  for (int a = 0; a < alg.dim; ++a) {
    for (int b = a + 1; b < alg.dim; ++b) {
      Eigen::MatrixXcd comm = basis_[a] * basis_[b] - basis_[b] * basis_[a];
      Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(n_, n_);
      for (int c = 0; c < alg.dim; ++c)
        if (alg.ad[a](c, b) != 0.0) want += alg.ad[a](c, b) * basis_[c];
      if ((comm - want).norm() > 1e-11)
        throw NumericalError("su(n) realization: structure constant mismatch");
    }
  }
}

Eigen::MatrixXcd SunRealization::to_matrix(const AlgebraVector& v) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
  for (int i = 0; i < alg_->dim; ++i)
    if (v[i] != 0.0) m += v[i] * basis_[i];
  return m;
}

AlgebraVector SunRealization::from_matrix(const Eigen::MatrixXcd& m,
                                          double tol) const {
  AlgebraVector v(alg_->dim);
  for (int i = 0; i < alg_->dim; ++i) {
    std::complex<double> c = -(basis_[i] * m).trace();
    v[i] = c.real();
  }
  if ((to_matrix(v) - m).norm() > tol * std::max(1.0, m.norm()))
    throw ValidationError("from_matrix: input is not in su(n)");
  return v;
}

const SunRealization& sun_realization_cache(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SunRealization>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<SunRealization>(algebra_cache(Family::A, n - 1)))
             .first;
  return *it->second;
}

Eigen::MatrixXcd sun_exp(const Eigen::MatrixXcd& x) { return expm_anti_hermitian(x); }

Eigen::MatrixXcd random_special_unitary(int n, Rng& rng) {
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(gaussian(rng), gaussian(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  std::complex<double> d = q.determinant();
  q.col(0) /= d;
  return q;
}

Eigen::MatrixXcd project_special_unitary(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXcd u = svd.matrixU() * svd.matrixV().adjoint();
  std::complex<double> d = u.determinant();
  u.col(0) /= d;
  return u;
}

double unitarity_defect(const Eigen::MatrixXcd& m) {
  int n = static_cast<int>(m.rows());
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(n, n)).norm();
}

AlcoveProjection alcove_project(const SunRealization& real,
                                const Eigen::MatrixXcd& m, double gap_tol) {
  int n = real.n();
  if (unitarity_defect(m) > 1e-9 || std::abs(m.determinant() - 1.0) > 1e-9)
    throw ValidationError("alcove_project: input is not special unitary");

  // Schur form of a normal matrix: unitary eigenvectors, eigenvalues on the
  // diagonal.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
  Eigen::MatrixXcd u = schur.matrixU();
  Eigen::VectorXcd ev = schur.matrixT().diagonal();

  // phases in [0, 2pi), sorted decreasing
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    double a = std::arg(ev[i]);
    theta[i] = a < 0 ? a + 2 * M_PI : a;
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return theta[a] > theta[b]; });

  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += theta[i];
  int s = static_cast<int>(std::lround(sum / (2 * M_PI)));

  // shift the s largest phases down by 2pi and cycle them to the back
  Eigen::VectorXd a(n);
  std::vector<int> order(n);
  for (int i = 0; i < n - s; ++i) {
    a[i] = theta[idx[i + s]];
    order[i] = idx[i + s];
  }
  for (int i = 0; i < s; ++i) {
    a[n - s + i] = theta[idx[i]] - 2 * M_PI;
    order[n - s + i] = idx[i];
  }

  // genericity: all consecutive gaps and the affine gap must be open
  for (int i = 0; i + 1 < n; ++i)
    if (a[i] - a[i + 1] < gap_tol)
      throw NonGenericError("alcove_project: degenerate eigenphase pair");
  if (2 * M_PI - (a[0] - a[n - 1]) < gap_tol)
    throw NonGenericError("alcove_project: eigenphases collide across the wall");
  if (std::abs(a.sum()) > 1e-9 * n)
    throw NumericalError("alcove_project: phase lift failed to sum to zero");

  Eigen::MatrixXcd up(n, n);
  for (int i = 0; i < n; ++i) up.col(i) = u.col(order[i]);
  std::complex<double> d = up.determinant();
  up.col(0) /= d;
  Eigen::MatrixXcd w = up.adjoint();

  AlcoveProjection out;
  out.phases = a;
  out.w = w;
  Eigen::MatrixXcd qmat = im * Eigen::MatrixXcd(a.cast<std::complex<double>>().asDiagonal());
  out.q = real.from_matrix(qmat, 1e-8);
  double resid = (w * m * w.adjoint() - sun_exp(qmat)).norm();
  if (resid > 1e-8)
    throw NumericalError("alcove_project: conjugation residual " + std::to_string(resid));
  return out;
}

}  // namespace twistred
