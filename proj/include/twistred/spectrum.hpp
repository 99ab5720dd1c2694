#pragma once

#include <vector>

#include "twistred/product_space.hpp"
#include "twistred/root_system.hpp"

namespace twistred {

/// Dominant integral weights are integer vectors of Dynkin labels; the Weyl
/// vector is all-ones in these coordinates.
using Weight = Eigen::VectorXi;

/// Representation-theoretic toolkit over a reduced root system.
class WeightToolkit {
 public:
  explicit WeightToolkit(RootSystem rs);

  const RootSystem& roots() const { return rs_; }
  int rank() const { return rs_.rank; }

  bool dominant(const Weight& mu) const;

  /// Weyl dimension formula (positive integer for dominant input).
  long dimension(const Weight& lambda) const;

  /// Contragredient highest weight -w0(lambda).
  Weight contragredient(const Weight& lambda) const;

  /// Weight composed with a diagram symmetry given by its node permutation.
  Weight compose_with_symmetry(const Weight& lambda,
                               const std::vector<int>& node_perm) const;

  /// All weights of V_lambda with multiplicities (Freudenthal recursion).
  struct WeightMultiplicity {
    Weight weight;
    long multiplicity;
  };
  std::vector<WeightMultiplicity> weight_system(const Weight& lambda) const;

  /// Multiplicity of V_nu inside V_lambda (x) V_mu.
  long tensor_multiplicity(const Weight& lambda, const Weight& mu,
                           const Weight& nu) const;

  /// dim (V_a (x) V_b (x) V_c)^G.
  long singlet_dimension(const Weight& a, const Weight& b, const Weight& c) const;

  /// kappa(mu + 2 delta, mu).
  double casimir_pairing(const Weight& mu) const;

  /// Guard for the brute-force path.
  int max_label = 60;

 private:
  RootSystem rs_;
  Eigen::MatrixXd fund_gram_;

  /// Strictly dominant representative of mu under the shifted action;
  /// returns 0 on a wall, else +-1, and writes the representative.
  int to_dominant_strict(Weight& mu) const;
  Weight to_dominant(Weight mu) const;
};

/// Closed-form su(2) singlet rule: dim(V_a (x) V_b (x) V_c)^G is 1 when
/// |a-b| <= c <= a+b with a+b+c even, else 0.
long su2_triangle_singlet(int a, int b, int c);

/// Laplace eigenvalue -sum_k kappa(Lambda_k + 2 delta, Lambda_k)/lambda_k.
double casimir_value(const WeightToolkit& wt, const std::vector<Weight>& weights,
                     const Eigen::VectorXd& lambdas);

/// The additive constant -kappa(delta, delta)/2 of the reduced quantum
/// Hamiltonian; independent of N and of the couplings.
double weyl_constant(const RootSystem& rs);

struct SpectralLevel {
  std::vector<Weight> weights;
  double energy = 0.0;       // -C2/2
  long multiplicity = 0;     // product of chain singlet dimensions
};

/// All levels with energy <= cutoff whose N-fold singlet chain
/// (V_{L2*} x V_{L1} x V_{nu1})^G ... (V_{L1* o gamma} x V_{LN} x V_{nuN})^G
/// is nonzero in every factor; sorted by energy.
std::vector<SpectralLevel> enumerate_levels(const WeightToolkit& wt,
                                            const std::vector<int>& gamma_node_perm,
                                            const Eigen::VectorXd& lambdas,
                                            const std::vector<Weight>& nu,
                                            double energy_cutoff);

/// Quantum spin potential on the K-invariant subspace of the product
/// representation (su(2) path, identity twist): the quantization
/// -1/2 sum_{a,b} (I(q)|_{K^perp})^{-1}_{ab} rho(T_a) rho(T_b) restricted to
/// V_nu^K, Hermitian and positive semidefinite on the open alcove.
Eigen::MatrixXcd spin_potential_matrix(const ProductSpace& space,
                                       const AlgebraVector& q,
                                       const std::vector<int>& nu_labels);

/// Anti-Hermitian su(2) representation matrices of the compact basis
/// (T_1, Y, Z) for Dynkin label m (dimension m+1).
std::vector<Eigen::MatrixXcd> su2_rep_matrices(int label);

}  // namespace twistred
