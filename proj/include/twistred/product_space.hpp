#pragma once

#include <Eigen/Dense>
#include <vector>

#include "twistred/lie_algebra.hpp"

namespace twistred {

/// The N positive scale factors lambda_k with sum 1/lambda_k = 1, plus the
/// partial sums b_I = sum_{k<=I} 1/lambda_k used by the closed-form kernels.
struct CouplingVector {
  Eigen::VectorXd lambdas;
  Eigen::VectorXd b;  // b[I] = sum_{k<=I} 1/lambda_k, b[N-1] = 1

  explicit CouplingVector(Eigen::VectorXd lam);
  int n() const { return static_cast<int>(lambdas.size()); }
  double b_diff(int i, int j) const { return b[i] - b[j]; }
};

/// Normalizes positive weights into an admissible coupling vector.
CouplingVector coupling_from_weights(const Eigen::VectorXd& weights);

/// Element of the N-fold product algebra, stored flat (component k occupies
/// segment [k*dim, (k+1)*dim)).
using ProductVector = Eigen::VectorXd;

/// Point of the reduced phase space model: q in the open alcove of T^gamma,
/// p in T^gamma, and a spin vector with vanishing K-component whose entries
/// live on fixed adjoint orbits.
struct ReducedPoint {
  AlgebraVector q;
  AlgebraVector p;
  ProductVector xi;
};

/// The N-fold product of a compact simple Lie algebra carrying the twisted
/// cyclic automorphism and the weighted invariant scalar product.
class ProductSpace {
 public:
  ProductSpace(const SimpleLieAlgebra& alg, DiagramAutomorphism aut,
               CouplingVector coupling);

  const SimpleLieAlgebra& algebra() const { return *alg_; }
  const DiagramAutomorphism& automorphism() const { return aut_; }
  const CouplingVector& coupling() const { return lam_; }
  int n() const { return lam_.n(); }
  int adim() const { return alg_->dim; }
  int pdim() const { return n() * adim(); }

  Eigen::VectorBlock<const ProductVector> component(const ProductVector& x,
                                                    int k) const {
    return x.segment(k * adim(), adim());
  }

  /// <X,Y>_lambda = sum_k lambda_k <X_k, Y_k>.
  double inner(const ProductVector& x, const ProductVector& y) const;

  ProductVector twist_apply(const ProductVector& x) const;
  ProductVector twist_transpose_apply(const ProductVector& x) const;

  /// e^{s ad_{qvec}} with qvec = (q/lambda_1, ..., q/lambda_N), q in T^gamma.
  ProductVector exp_ad_q(const AlgebraVector& q, const ProductVector& x,
                         double sign = 1.0) const;

  /// Orthogonal projections (w.r.t. <,>_lambda) onto the diagonal Cartan
  /// K = T^gamma_diag and onto Q = {q/lambda_1 + ... + q/lambda_N}.
  ProductVector project_K(const ProductVector& x) const;
  ProductVector project_Q(const ProductVector& x) const;
  ProductVector project_K_perp(const ProductVector& x) const;
  ProductVector project_Q_perp(const ProductVector& x) const;

  /// Lift q in T^gamma to (q/lambda_1, ..., q/lambda_N); same for p.
  ProductVector q_lift(const AlgebraVector& q) const;

  /// T^gamma part of sum_k X_k (inverse of q_lift on Q).
  AlgebraVector q_drop(const ProductVector& x) const;

  /// Full-space matrix of Gamma'^T - e^{-ad_{qvec}}.
  Eigen::MatrixXd constraint_matrix_full(const AlgebraVector& q) const;

  /// The restriction Z(q): Q^perp -> K^perp as a dense square matrix in the
  /// stored orthonormal bases. Throws NonGenericError off the open alcove.
  Eigen::MatrixXd constraint_operator(const AlgebraVector& q) const;

  /// Unique preimage under Z(q) of eta in K^perp.
  ProductVector constraint_solve(const AlgebraVector& q,
                                 const ProductVector& eta) const;

  /// Solves the momentum constraint on the gauge slice:
  /// J = (p/lambda_k)_k - Z(q)^{-1}(xi), requiring xi_K = 0.
  ProductVector solve_momentum_constraint(const AlgebraVector& q,
                                          const AlgebraVector& p,
                                          const ProductVector& xi) const;

  /// Residual of the slice momentum constraint at (q, J, xi).
  double constraint_residual(const AlgebraVector& q, const ProductVector& j,
                             const ProductVector& xi) const;

  /// Reduced Hamiltonian, route 1: 1/2<p,p> + 1/2 |Z(q)^{-1} xi|^2_lambda.
  double hamiltonian_constraint_form(const ReducedPoint& pt) const;

  /// Reduced Hamiltonian, route 2 through the deformation operator
  /// U(q) = (id - e^{-ad_qvec} Gamma')|_{K^perp}.
  double hamiltonian_deformation_form(const ReducedPoint& pt) const;

  /// Full-space matrix of id - e^{-ad_qvec} Gamma'.
  Eigen::MatrixXd deformation_matrix_full(const AlgebraVector& q) const;

  /// lambda-transpose of a full-space matrix.
  Eigen::MatrixXd lambda_transpose(const Eigen::MatrixXd& m) const;

  /// Orthonormal bases (w.r.t. <,>_lambda), columns in flat coordinates.
  const Eigen::MatrixXd& K_basis() const { return k_basis_; }
  const Eigen::MatrixXd& Q_basis() const { return q_basis_; }
  const Eigen::MatrixXd& K_perp_basis() const { return k_perp_; }
  const Eigen::MatrixXd& Q_perp_basis() const { return q_perp_; }

  Eigen::MatrixXd fixed_cartan() const { return t_fix_; }

  /// Diagonal torus action Ad_k with k = exp(t), t in T^gamma, applied to
  /// every component.
  ProductVector residual_gauge(const AlgebraVector& t, const ProductVector& x) const;

  /// Coordinates of <,>_lambda: diag(lambda) blocks.
  Eigen::VectorXd metric_diagonal() const;

  /// Validates a reduced point (alcove membership, xi_K = 0, shapes).
  void validate(const ReducedPoint& pt, double tol = 1e-8) const;

 private:
  const SimpleLieAlgebra* alg_;
  DiagramAutomorphism aut_;
  CouplingVector lam_;
  Eigen::MatrixXd t_fix_;    // fixed Cartan basis, algebra coordinates
  Eigen::MatrixXd k_basis_, q_basis_, k_perp_, q_perp_;
};

/// Random spin vector on a product of adjoint orbits with xi_K = 0: each
/// component is a random adjoint dressing of a seed, and the Cartan part of
/// the last component is shifted to kill the K-projection. The orbits are
/// defined by the returned components themselves.
ProductVector random_orbit_spin(const ProductSpace& space, Rng& rng,
                                double scale = 1.0);

/// Seeded random reduced point with alcove margin.
ReducedPoint random_reduced_point(const ProductSpace& space, Rng& rng,
                                  double spin_scale = 1.0,
                                  double alcove_margin = 0.3);

/// Sorted imaginary parts of the spectrum of ad_xi (orbit invariants).
Eigen::VectorXd orbit_invariants(const SimpleLieAlgebra& alg,
                                 const AlgebraVector& xi);

}  // namespace twistred
