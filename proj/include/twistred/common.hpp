#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <string>

namespace twistred {

// Error taxonomy mirrors the CLI exit codes: validation -> 1,
// numerical failure -> 2, non-generic input -> 3.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonGenericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng, double sigma = 1.0) {
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, int n, double sigma = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(rng, sigma);
  return v;
}

/// exp(A) for a real skew-symmetric matrix, via the Hermitian matrix iA.
Eigen::MatrixXd expm_skew(const Eigen::MatrixXd& a);

/// exp(X) for an anti-Hermitian complex matrix (stays exactly unitary).
Eigen::MatrixXcd expm_anti_hermitian(const Eigen::MatrixXcd& x);

/// Largest principal angle between the column spans of two orthonormal bases.
double subspace_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Orthonormal basis of the column span (rank decided at tol).
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, double tol = 1e-10);

/// Orthonormal basis of the kernel of m.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol = 1e-10);

}  // namespace twistred
