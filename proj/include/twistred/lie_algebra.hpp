#pragma once

#include <Eigen/Dense>
#include <vector>

#include "twistred/root_system.hpp"

namespace twistred {

/// Element of a compact simple Lie algebra, stored as real coordinates in the
/// orthonormal basis (T_1..T_r, Y_phi.., Z_phi..).
using AlgebraVector = Eigen::VectorXd;

/// Automorphism induced by a symmetry of the Dynkin diagram.
///
/// On the compact basis it acts as a signed permutation of the (Y,Z) root
/// planes together with an orthogonal map on the Cartan part. The group-level
/// realization (entrywise conjugation on SU(n)) exists only for family A.
struct DiagramAutomorphism {
  int order = 1;
  std::vector<int> node_perm;    // permutation of simple roots
  std::vector<int> root_perm;    // induced permutation of positive roots
  std::vector<int> root_sign;    // sigma_phi = +-1 per positive root
  Eigen::MatrixXd matrix;        // dim x dim, compact basis
  bool group_level = false;

  bool is_identity() const { return order == 1; }
};

/// Compact real form of a simple Lie algebra built from Cartan data.
///
/// The invariant form <.,.> = -kappa is normalized so that long roots have
/// squared length 2 and the stored basis is orthonormal. Root vectors satisfy
/// kappa(X_phi, X_{-phi}) = 1; the compact basis is
///     Y_phi = i(X_phi + X_{-phi})/sqrt(2),  Z_phi = (X_phi - X_{-phi})/sqrt(2).
///
/// Families A (rank 1-6) and D (rank 4) are constructed directly from a
/// two-cocycle on the root lattice; B, C and G2 are realized as fixed-point
/// subalgebras of a simply-laced parent under a diagram automorphism.
class SimpleLieAlgebra {
 public:
  Family family = Family::A;
  int rank = 0;
  int npos = 0;
  int dim = 0;
  RootSystem roots;

  /// root_angle(p, j) = -i phi_p(T_j) = phi_p(u_j), real.
  Eigen::MatrixXd root_angle;

  /// Adjoint matrix of each basis element (real, skew in this basis).
  std::vector<Eigen::MatrixXd> ad;

  /// C > 0 with <X,Y> = -C tr(ad_X ad_Y).
  double normalization_constant = 0.0;

  /// u_j = sum_k cartan_orthobasis(j,k) t_{alpha_k}.
  Eigen::MatrixXd cartan_orthobasis;

  /// Complex structure constants: [X_a, X_b] = nx(a,b) X_{a+b} whenever the
  /// index sum is a root. Indices 0..npos-1 are positive roots, npos..2npos-1
  /// the corresponding negatives.
  Eigen::MatrixXd nx;

  /// For each non-simple positive root p: X_p = [X_{alpha_i}, X_q]/coeff.
  struct Chain {
    int simple_node = -1;
    int lower = -1;
    double coeff = 0.0;
  };
  std::vector<Chain> chains;

  int t_index(int j) const { return j; }
  int y_index(int p) const { return rank + p; }
  int z_index(int p) const { return rank + npos + p; }
  int simple_root_index(int node) const;

  /// -i phi_p(q) for q given by its full coordinate vector (Cartan part used).
  double theta(int p, const AlgebraVector& q) const;

  AlgebraVector basis_vector(int i) const;

  /// True if the Y/Z coordinates of v vanish to tol.
  bool in_cartan(const AlgebraVector& v, double tol = 1e-10) const;

  Eigen::MatrixXd ad_of(const AlgebraVector& v) const;
};

/// Builds the compact simple Lie algebra. Supported: A 1-6, B 2-4, C 2-4,
/// D 4, G2. Anything else is rejected.
SimpleLieAlgebra build_algebra(Family f, int rank);

/// Shared immutable instances (values are never mutated after construction).
const SimpleLieAlgebra& algebra_cache(Family f, int rank);

AlgebraVector bracket(const SimpleLieAlgebra& alg, const AlgebraVector& x,
                      const AlgebraVector& y);

/// e^{ad_q} for q in the Cartan subalgebra: identity on T, rotation by
/// theta_phi(q) on each (Y_phi, Z_phi) plane.
AlgebraVector exp_ad_cartan(const SimpleLieAlgebra& alg, const AlgebraVector& q,
                            const AlgebraVector& x, double sign = 1.0);

/// Diagram automorphism of the given order (1 always; 2 for A rank>=2 and
/// D; 3 for D4 only).
DiagramAutomorphism diagram_automorphism(const SimpleLieAlgebra& alg, int order);

DiagramAutomorphism identity_automorphism(const SimpleLieAlgebra& alg);

AlgebraVector automorphism_apply(const DiagramAutomorphism& aut,
                                 const AlgebraVector& x);

/// Orthonormal basis of the fixed-point part T^gamma of the Cartan,
/// as columns in compact coordinates.
Eigen::MatrixXd fixed_cartan_basis(const SimpleLieAlgebra& alg,
                                   const DiagramAutomorphism& aut);

/// Smallest slack among the inequalities cutting out the open alcove in
/// T^gamma (positive inside). Throws if q is not in T^gamma.
double alcove_margin(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut,
                     const AlgebraVector& q);

/// Membership in the open alcove, decided with tolerance tol on the
/// defining inequalities.
bool alcove_contains(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut,
                     const AlgebraVector& q, double tol = 1e-12);

/// Seeded sample from the open alcove, at relative distance >= margin
/// from every wall.
AlgebraVector random_alcove_point(const SimpleLieAlgebra& alg,
                                  const DiagramAutomorphism& aut, Rng& rng,
                                  double margin = 0.05);

/// Copy of the algebra with the Cartan basis rotated by an orthogonal map,
/// T'_j = sum_k o(j,k) T_k. Results of every computation must be independent
/// of this choice.
SimpleLieAlgebra rotate_cartan_basis(const SimpleLieAlgebra& alg,
                                     const Eigen::MatrixXd& o);

/// Complex coordinates (T_j, X_phi) of a real algebra vector; entries
/// 0..r-1 are the T coefficients, then X_{phi} for positive phi, then
/// X_{-phi}.
Eigen::VectorXcd to_root_coords(const SimpleLieAlgebra& alg,
                                const AlgebraVector& v);
AlgebraVector from_root_coords(const SimpleLieAlgebra& alg,
                               const Eigen::VectorXcd& c);

}  // namespace twistred
