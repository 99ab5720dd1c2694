#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twistred/common.hpp"

namespace twistred {

enum class Family : char { A = 'A', B = 'B', C = 'C', D = 'D', G2 = 'G' };

Family family_from_string(const std::string& s);
std::string family_name(Family f, int rank);

/// Reduced root system generated from a Cartan matrix.
///
/// Conventions:
///   cartan(i,j) = <alpha_i, alpha_j^vee> = 2(alpha_i,alpha_j)/(alpha_j,alpha_j)
///   simple_gram(i,j) = (alpha_i, alpha_j), scaled so long roots have
///   squared length 2.
/// Positive roots are stored as integer coordinate vectors in the
/// simple-root basis, ordered by height and discovery.
struct RootSystem {
  Family family = Family::A;
  int rank = 0;
  Eigen::MatrixXi cartan;
  Eigen::MatrixXd simple_gram;
  std::vector<Eigen::VectorXi> positive;

  int num_positive() const { return static_cast<int>(positive.size()); }

  /// <beta, alpha_j^vee> for beta in simple-root coordinates (integer).
  int pairing(const Eigen::VectorXi& beta, int j) const;

  /// (beta, gamma) under the normalized invariant form.
  double inner(const Eigen::VectorXi& beta, const Eigen::VectorXi& gamma) const;

  /// Dynkin labels <beta, alpha_j^vee> of a root.
  Eigen::VectorXi weight_coords(const Eigen::VectorXi& beta) const;

  /// Index of a positive root (-1 if absent).
  int index_of(const Eigen::VectorXi& beta) const;

  bool is_root(const Eigen::VectorXi& beta) const;

  /// Index of the highest root.
  int highest_root_index() const;

  /// Gram matrix (omega_i, omega_j) of the fundamental weights.
  Eigen::MatrixXd fundamental_gram() const;

  /// kappa(mu + 2 delta, mu) for a weight mu in fundamental coordinates,
  /// with delta the Weyl vector (all-ones in fundamental coordinates).
  double casimir_pairing(const Eigen::VectorXd& mu) const;
};

RootSystem build_root_system(Family f, int rank);

/// Cartan matrix of a family in the numbering used throughout:
/// chains 0-1-...-(r-1); for D the nodes r-2, r-1 both attach to r-3;
/// for B the last simple root is short, for C it is long.
Eigen::MatrixXi cartan_matrix(Family f, int rank);

}  // namespace twistred
