#pragma once

#include <Eigen/Dense>
#include <vector>

#include "twistred/lie_algebra.hpp"

namespace twistred {

/// Defining representation of the A-family compact algebra: the abstract
/// orthonormal basis mapped onto traceless anti-Hermitian n x n matrices.
/// The embedding is pinned on generators (X_{alpha_i} -> E_{i,i+1}) and
/// extended along the stored bracket chains; the constructor verifies every
/// structure constant against matrix commutators.
class SunRealization {
 public:
  explicit SunRealization(const SimpleLieAlgebra& alg);

  int n() const { return n_; }
  const SimpleLieAlgebra& algebra() const { return *alg_; }
  const std::vector<Eigen::MatrixXcd>& basis() const { return basis_; }

  Eigen::MatrixXcd to_matrix(const AlgebraVector& v) const;

  /// Inverse of to_matrix; rejects matrices that are not traceless
  /// anti-Hermitian (to tol).
  AlgebraVector from_matrix(const Eigen::MatrixXcd& m, double tol = 1e-9) const;

 private:
  int n_;
  const SimpleLieAlgebra* alg_;
  std::vector<Eigen::MatrixXcd> basis_;
};

const SunRealization& sun_realization_cache(int n);

/// Group exponential of a traceless anti-Hermitian matrix (exactly unitary).
Eigen::MatrixXcd sun_exp(const Eigen::MatrixXcd& x);

Eigen::MatrixXcd random_special_unitary(int n, Rng& rng);

/// Nearest special unitary (polar factor, det phase spread over a column).
Eigen::MatrixXcd project_special_unitary(const Eigen::MatrixXcd& m);

double unitarity_defect(const Eigen::MatrixXcd& m);

/// Alcove representative of a generic special unitary matrix:
/// w m w^{-1} = exp(q) with q = i diag(a), the eigenphases a sorted
/// decreasing, consecutive and wrap-around gaps positive, spread < 2pi and
/// sum zero. Throws NonGenericError when the spectrum is degenerate to
/// gap_tol.
struct AlcoveProjection {
  AlgebraVector q;       // abstract coordinates (Cartan part only)
  Eigen::MatrixXcd w;    // special unitary conjugator
  Eigen::VectorXd phases;  // the sorted lift a
};
AlcoveProjection alcove_project(const SunRealization& real,
                                const Eigen::MatrixXcd& m, double gap_tol = 1e-8);

}  // namespace twistred
