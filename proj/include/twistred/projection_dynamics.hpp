#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "twistred/product_space.hpp"
#include "twistred/sun_realization.hpp"
#include "twistred/sutherland.hpp"

namespace twistred {

enum class GroupTwist { Identity, EntrywiseConjugate };

using MatrixList = std::vector<Eigen::MatrixXcd>;

/// Point of the extended phase space in right trivialization: N unitary
/// unimodular matrices, N traceless anti-Hermitian momenta, N spins on fixed
/// adjoint orbits.
struct UnreducedPoint {
  MatrixList g;
  MatrixList j;
  MatrixList xi;
  int n_factors() const { return static_cast<int>(g.size()); }
};

/// Value plus phase-space gradients of an observable, in the layout expected
/// by the canonical bracket: dg is the right-logarithmic derivative
/// (d/dt F(e^{tX} g) = <dg, X>_lambda), dj and dxi are metric gradients.
struct PhaseGradient {
  double value = 0.0;
  MatrixList dg, dj, dxi;
};

using Observable = std::function<PhaseGradient(const UnreducedPoint&)>;

/// Free geodesic system on the N-fold product of SU(n) with a twisted cyclic
/// symmetry; exact solutions by flowing upstairs and projecting onto the
/// gauge slice.
class ProjectionSystem {
 public:
  ProjectionSystem(const SunRealization& real, CouplingVector coupling,
                   GroupTwist twist = GroupTwist::Identity);

  const SunRealization& realization() const { return *real_; }
  const CouplingVector& coupling() const { return lam_; }
  GroupTwist twist() const { return twist_; }
  int n() const { return lam_.n(); }
  int matrix_dim() const { return real_->n(); }

  /// Product space over the same algebra/coupling (identity twist only).
  const ProductSpace& reduced_model() const;

  Eigen::MatrixXcd group_twist_apply(const Eigen::MatrixXcd& g) const;
  Eigen::MatrixXcd algebra_twist_apply(const Eigen::MatrixXcd& x) const;
  Eigen::MatrixXcd algebra_twist_inverse(const Eigen::MatrixXcd& x) const;

  double weighted_inner(const MatrixList& x, const MatrixList& y) const;

  /// H = 1/2 <J,J>_lambda, constant along the free flow.
  double hamiltonian(const UnreducedPoint& pt) const;

  UnreducedPoint free_flow(double t, const UnreducedPoint& pt) const;

  /// Psi = Gamma'^T(J) - Ad_{g^{-1}}(J) + xi, componentwise.
  MatrixList momentum_map(const UnreducedPoint& pt) const;
  double momentum_residual(const UnreducedPoint& pt) const;

  Eigen::MatrixXcd monodromy(const MatrixList& g) const;

  /// Twisted conjugation of the product group on itself.
  MatrixList twisted_conjugate(const MatrixList& eta, const MatrixList& g) const;

  /// Lift of the twisted conjugation to the extended phase space.
  UnreducedPoint extended_action(const MatrixList& eta, const UnreducedPoint& pt) const;

  /// Solves the last N-1 components of g' = C_eta(g) for eta_{N-1},..,eta_1
  /// given eta_N; with g' = g this is the isotropy chain.
  MatrixList reconstruct_gauge(const MatrixList& g, const MatrixList& gprime,
                               const Eigen::MatrixXcd& eta_n) const;
  MatrixList reconstruct_gauge(const MatrixList& g, const Eigen::MatrixXcd& eta_n) const;

  /// Slice point over a reduced point: (e^{qvec}, J, xi) with J from the
  /// momentum constraint.
  UnreducedPoint unreduce(const ReducedPoint& rp) const;

  /// Gauge transport of a constrained point to the slice: alcove projection
  /// of the monodromy, gauge chain, momentum/spin transport. Identity twist
  /// only.
  ReducedPoint reduce_point(const UnreducedPoint& pt) const;

  /// phi_u = -g^{-1} J g + xi/u, invariant along the free flow.
  MatrixList charge_field(const UnreducedPoint& pt, double u) const;

  /// Canonical Poisson bracket of two observables given by value+gradients.
  double poisson_bracket(const Observable& f, const Observable& g,
                         const UnreducedPoint& pt) const;

  /// Observable <J, X>_lambda.
  Observable momentum_observable(const MatrixList& x) const;
  /// Observable <xi, X>_lambda.
  Observable spin_observable(const MatrixList& x) const;
  /// Observable <phi_u, X>_lambda.
  Observable charge_component_observable(const MatrixList& x, double u) const;
  /// Observable h_m(phi_u), h_m(X) = sum_k lambda_k Re[(-i)^m tr(X_k^m)].
  Observable charge_trace_observable(int degree, double u) const;

  /// Exact reduced trajectory by the projection method, sampled on t_grid.
  Trajectory project_trajectory(const ReducedPoint& start,
                                const std::vector<double>& t_grid) const;

  /// Seeded random constrained point: a random reduced point pushed to the
  /// slice and dressed by a random twisted conjugation.
  UnreducedPoint random_constrained_point(Rng& rng, double spin_scale = 1.0) const;

  MatrixList random_group_tuple(Rng& rng) const;

  void validate(const UnreducedPoint& pt, double tol = 1e-9) const;

 private:
  const SunRealization* real_;
  CouplingVector lam_;
  GroupTwist twist_;
  std::unique_ptr<ProductSpace> model_;  // identity twist only
};

/// Finite-difference validation of an observable's gradients at a point
/// (step 1e-6); returns the worst absolute deviation.
double gradient_check(const ProjectionSystem& sys, const Observable& obs,
                      const UnreducedPoint& pt, Rng& rng, int trials = 5,
                      double step = 1e-6);

}  // namespace twistred
