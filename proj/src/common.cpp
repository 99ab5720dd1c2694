#include "twistred/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace twistred {

Eigen::MatrixXd expm_skew(const Eigen::MatrixXd& a) {
  // iA is Hermitian when A is real skew; exp(A) = V exp(-i diag) V^*.
  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXcd h = im * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases =
      (-im * es.eigenvalues().cast<std::complex<double>>().array()).exp();
  Eigen::MatrixXcd e =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return e.real();
}

Eigen::MatrixXcd expm_anti_hermitian(const Eigen::MatrixXcd& x) {
  const std::complex<double> im(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(im * x);
  Eigen::VectorXcd phases = (-im * es.eigenvalues().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double subspace_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.cols() != v.cols()) return M_PI / 2;
  if (u.cols() == 0) return 0.0;
  // sine-based formula, accurate for nearly equal subspaces
  Eigen::MatrixXd resid = u - v * (v.transpose() * u);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  double s = std::clamp(svd.singularValues().maxCoeff(), 0.0, 1.0);
  return std::asin(s);
}

Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, double tol) {
  if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  int r = 0;
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol * std::max(1.0, smax)) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  int n = static_cast<int>(m.cols());
  int r = 0;
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol * std::max(1.0, smax)) ++r;
  return svd.matrixV().rightCols(n - r);
}

}  // namespace twistred
