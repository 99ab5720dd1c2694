#pragma once

#include <string>
#include <vector>

#include "twistred/product_space.hpp"

namespace twistred {

/// N x N cyclic hopping matrix governing the reduced kinetic form on each
/// root channel:
///   M_{I,J}(ix) = (l_I + l_{I+1}) d_{I,J} - l_I e^{-ix/l_I} d_{I-1,J}
///                 - l_{I+1} e^{ix/l_{I+1}} d_{I+1,J},
/// indices mod N. Hermitian; a 2pi shift of x acts by conjugation with the
/// diagonal phase diag(e^{-2pi i b_I}).
Eigen::MatrixXcd hopping_matrix(double x, const CouplingVector& lam);

/// Closed-form inverse of hopping_matrix, valid for x not in 2*pi*Z:
///   P_{I,J} = e^{-i b_{I,J} x} ( 1/(4 sin^2(x/2)) + i b_{I,J} cot(x/2)/2
///             - |b_{I,J}|/2 ).
/// Throws NonGenericError within 1e-8 of a singular argument.
Eigen::MatrixXcd hopping_inverse(double x, const CouplingVector& lam);

/// Analytic x-derivative of hopping_inverse (used for the force evaluation;
/// finite differences are only a test oracle).
Eigen::MatrixXcd hopping_inverse_dx(double x, const CouplingVector& lam);

/// Real matrix P'_{I,J} = (b_{I,J}^2 - |b_{I,J}|)/2 coupling the Cartan
/// charges in the closed-form Hamiltonian.
Eigen::MatrixXd cartan_coupling_matrix(const CouplingVector& lam);

/// Orthogonal projection onto the complement of span{[1..1]} w.r.t. the
/// x^* Lambda y inner product.
Eigen::MatrixXcd zero_mode_projector(const CouplingVector& lam);

/// (pi_perp P' Lambda pi_perp): inverts (Lambda^{-1} M(0)) on the complement
/// of its kernel span{[1..1]}.
Eigen::MatrixXd hopping_zero_mode_inverse(const CouplingVector& lam);

/// Pairings of a spin vector with the product root/Cartan basis:
/// c(p, I) = <Xvec_phi^I, xi>_lambda and t(j, I) = <Tvec_j^I, xi>_lambda.
struct SpinChargeBlock {
  Eigen::MatrixXcd c;  // npos x N
  Eigen::MatrixXd t;   // rank x N
};
SpinChargeBlock spin_charges(const ProductSpace& space, const ProductVector& xi);

/// The operator I(q) = U(q)^T U(q) acting channel-by-channel through the
/// hopping matrices (identity automorphism only).
ProductVector spin_metric_apply(const ProductSpace& space, const AlgebraVector& q,
                                const ProductVector& x);

/// Closed-form reduced Hamiltonian (identity automorphism): kinetic term,
/// Cartan charge coupling through P', root charge coupling through
/// P(i theta_phi(q)).
double hamiltonian_closed_form(const ProductSpace& space, const ReducedPoint& pt);

struct ReducedRhs {
  AlgebraVector qdot;
  AlgebraVector pdot;
  ProductVector xidot;
};

/// Hamiltonian vector field on the reduced model: qdot = p,
/// pdot = -dH/dq via the analytic derivative of the hopping inverse,
/// xidot_k = [grad_{xi_k} H / lambda_k, xi_k].
ReducedRhs reduced_vector_field(const ProductSpace& space, const ReducedPoint& pt);

/// Gradient of the closed-form Hamiltonian in the Cartan coordinates of q.
Eigen::VectorXd hamiltonian_q_gradient(const ProductSpace& space,
                                       const ReducedPoint& pt);

struct TrajectorySample {
  double t = 0.0;
  ReducedPoint point;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::string status = "ok";      // "ok" or "truncated"
  double truncated_at = 0.0;      // meaningful when truncated
  double max_energy_drift = 0.0;
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double wall_guard = 1e-6;  // minimal alcove margin along the flow
  double h_init = 1e-3;
  double h_min = 1e-12;
  long max_steps = 2000000;
};

/// Adaptive explicit Runge-Kutta integration of the reduced flow through the
/// given sample times. Truncates (with status) when the trajectory
/// approaches an alcove wall closer than the guard band.
Trajectory integrate_reduced(const ProductSpace& space, const ReducedPoint& start,
                             const std::vector<double>& t_grid,
                             const IntegratorOptions& opt = {});

/// CSV schema shared with the projection-method trajectories:
/// t, q coords, p coords, H, then per component the invariants
/// <xi_k,xi_k> and tr(ad_{xi_k}^4).
void write_trajectory_csv(const std::string& path, const ProductSpace& space,
                          const Trajectory& traj);

}  // namespace twistred
