#pragma once

#include <functional>
#include <vector>

#include "twistred/product_space.hpp"
#include "twistred/sun_realization.hpp"

namespace twistred {

enum class GroupTwistYM { Identity, EntrywiseConjugate };

/// Quasi-periodic field data on the unit cylinder, supported by marked
/// points 0 < x_1 < ... < x_N < 1 with the convention x_0 = x_N - 1.
/// Between marks the electric field is E(x) = e^{-(x - x_k) ad_chi} E_k^+,
/// and the whole configuration repeats up to the algebra twist tau'.
struct FieldConfig {
  const SimpleLieAlgebra* alg = nullptr;
  DiagramAutomorphism gamma;               // tau' = gamma'^{-1}
  Eigen::VectorXd marks;                   // x_1..x_N in (0, 1)
  std::vector<AlgebraVector> charges;      // zeta_k at x_k, k = 1..N
  AlgebraVector chi;                       // constant connection, open alcove
  std::vector<AlgebraVector> plus_limits;  // E_k^+ for k = 0..N-1
  AlgebraVector momentum;                  // the p of the matching slice point

  int n() const { return static_cast<int>(marks.size()); }
  double mark(int k) const;                      // x_k for any integer k >= 0
  AlgebraVector tau_apply(const AlgebraVector& v) const;  // tau' = gamma'^T
  AlgebraVector plus_limit(int k) const;         // E_k^+ with quasi-periodicity
  AlgebraVector minus_limit(int k) const;        // E_k^- at x_k, k = 1..N
  /// E(x) anywhere on the line.
  AlgebraVector field_at(double x) const;
};

/// Coupling vector lambda_k = 1/(x_k - x_{k-1}) induced by the marks;
/// the unit period makes sum 1/lambda_k = 1 automatic.
CouplingVector coupling_from_marks(const Eigen::VectorXd& marks);

/// Solves the jump conditions zeta_k + (E_k^+ - E_k^-) = 0 on the gauge
/// slice by mapping to the finite-dimensional momentum constraint
/// (lambda from marks, xi_k = zeta_k/lambda_k, E_{k-1}^+ = lambda_k J_k).
/// Requires chi in the open alcove and charges whose total T^gamma part
/// vanishes.
FieldConfig solve_slice(const SimpleLieAlgebra& alg, const DiagramAutomorphism& gamma,
                        const Eigen::VectorXd& marks,
                        const std::vector<AlgebraVector>& charges,
                        const AlgebraVector& chi, const AlgebraVector& momentum);

/// Largest jump-condition residual over the marks.
double jump_residual(const FieldConfig& cfg);

/// Componentwise residual of the finite-dimensional form of the jump
/// conditions, xi_k + (l_{k+1}/l_k) J_{k+1} - e^{-ad_{q/l_k}} J_k.
double correspondence_residual(const FieldConfig& cfg);

/// Integral of <E, E> over one period; exact because <E,E> is constant on
/// each interval.
double field_energy(const FieldConfig& cfg);

/// || sum_k (x_k - x_{k-1}) proj_{T^gamma}(E_{k-1}^+) - p ||: the
/// coefficient identity behind the canonical 1-form restriction.
double theta_pairing_check(const FieldConfig& cfg);

/// The reduced data (coupling, q = chi, p, xi) carried by a slice
/// configuration.
struct SliceData {
  CouplingVector coupling;
  ReducedPoint point;
  ProductVector j;  // lambda_k J_k = E_{k-1}^+
};
SliceData slice_to_reduced(const FieldConfig& cfg);

// ---------------------------------------------------------------------------
// Wilson lines and gauge fixing (SU(n) realization)
// ---------------------------------------------------------------------------

/// Piecewise-smooth quasi-periodic connection on the line: evaluators on
/// [0,1) split at the stored breakpoints, extended by A(x+1) = tau'(A(x)).
struct ConnectionSample {
  int n = 2;
  GroupTwistYM twist = GroupTwistYM::Identity;
  std::vector<double> breaks;  // ascending, inside [0, 1)
  std::function<Eigen::MatrixXcd(double)> base;  // on [0, 1)

  Eigen::MatrixXcd at(double x) const;
};

struct WilsonOptions {
  int steps_per_unit = 400;        // fourth-order commutator-free steps
  double unitarity_threshold = 1e-9;
};

/// Fundamental solution of y' = y A with y(0) = id, glued continuously at
/// the marked points. Satisfies y(x+1) = y(1) tau(y(x)).
Eigen::MatrixXcd wilson_line(const ConnectionSample& a, double x,
                             const WilsonOptions& opt = {});

/// Path values at the requested sample points (single forward sweep).
std::vector<Eigen::MatrixXcd> wilson_line_path(const ConnectionSample& a,
                                               const std::vector<double>& xs,
                                               const WilsonOptions& opt = {});

/// Gauge transformation of a connection by a given group-valued path with
/// known derivative: A^g = g A g^{-1} - g' g^{-1}.
ConnectionSample gauge_transform(const ConnectionSample& a,
                                 std::function<Eigen::MatrixXcd(double)> g,
                                 std::function<Eigen::MatrixXcd(double)> gdot);

/// Wilson-line sample dump: x, then the matrix entries flattened row-major
/// with interleaved real/imaginary parts.
void write_wilson_csv(const std::string& path, const ConnectionSample& a,
                      const std::vector<double>& xs,
                      const WilsonOptions& opt = {});

/// Gauge fixing to a constant connection in the closed alcove:
/// e^chi = w y_A(1) w^{-1} and g_A(x) = e^{-x chi} w y_A(x) satisfies
/// g_A A g_A^{-1} - g_A' g_A^{-1} = chi and g_A(x+1) = g_A(x).
/// Identity twist only (the alcove step needs untwisted conjugacy classes).
struct ConstantGauge {
  AlgebraVector chi;
  Eigen::MatrixXcd w;
  Eigen::MatrixXcd chi_mat;
  ConnectionSample connection;
  WilsonOptions options;

  Eigen::MatrixXcd at(double x) const;
  /// Values at ascending sample points from one integration sweep (use this
  /// for finite-difference stencils: the values share a step grid).
  std::vector<Eigen::MatrixXcd> path(const std::vector<double>& xs) const;
};
ConstantGauge gauge_to_constant(const SunRealization& real, const ConnectionSample& a,
                                const WilsonOptions& opt = {});

}  // namespace twistred
