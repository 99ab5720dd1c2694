#include "twistred/product_space.hpp"

#include <Eigen/Eigenvalues>

namespace twistred {

CouplingVector::CouplingVector(Eigen::VectorXd lam) : lambdas(std::move(lam)) {
  if (lambdas.size() < 1) throw ValidationError("coupling: need N >= 1");
  if ((lambdas.array() <= 0).any())
    throw ValidationError("coupling: scale factors must be positive");
  double s = lambdas.cwiseInverse().sum();
  if (std::abs(s - 1.0) > 1e-12)
    throw ValidationError("coupling: sum of 1/lambda_k must be 1 (got " +
                          std::to_string(s) + ")");
  b.resize(lambdas.size());
  double acc = 0.0;
  for (int k = 0; k < lambdas.size(); ++k) {
    acc += 1.0 / lambdas[k];
    b[k] = acc;
  }
}

CouplingVector coupling_from_weights(const Eigen::VectorXd& weights) {
  if ((weights.array() <= 0).any())
    throw ValidationError("coupling weights must be positive");
  double s = weights.cwiseInverse().sum();
  return CouplingVector(weights * s);
}

ProductSpace::ProductSpace(const SimpleLieAlgebra& alg, DiagramAutomorphism aut,
                           CouplingVector coupling)
    : alg_(&alg), aut_(std::move(aut)), lam_(std::move(coupling)) {
  t_fix_ = fixed_cartan_basis(alg, aut_);
  int tdim = static_cast<int>(t_fix_.cols());
  int nd = pdim();

  // K = diagonal embedding of T^gamma, Q = (q/lambda_k)_k.
  Eigen::MatrixXd k_raw = Eigen::MatrixXd::Zero(nd, tdim);
  Eigen::MatrixXd q_raw = Eigen::MatrixXd::Zero(nd, tdim);
  for (int k = 0; k < n(); ++k) {
    k_raw.block(k * adim(), 0, adim(), tdim) = t_fix_;
    q_raw.block(k * adim(), 0, adim(), tdim) = t_fix_ / lam_.lambdas[k];
  }
  // Orthonormalize w.r.t. <,>_lambda by working in weighted coordinates.
  Eigen::VectorXd w = metric_diagonal().cwiseSqrt();
  auto orthonormal = [&](const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd scaled = w.asDiagonal() * raw;
    return Eigen::MatrixXd(w.cwiseInverse().asDiagonal() * orthonormal_span(scaled));
  };
  k_basis_ = orthonormal(k_raw);
  q_basis_ = orthonormal(q_raw);

  auto complement = [&](const Eigen::MatrixXd& basis) {
    Eigen::MatrixXd scaled = w.asDiagonal() * basis;  // orthonormal columns
    Eigen::MatrixXd proj =
        Eigen::MatrixXd::Identity(nd, nd) - scaled * scaled.transpose();
    return Eigen::MatrixXd(w.cwiseInverse().asDiagonal() * orthonormal_span(proj));
  };
  k_perp_ = complement(k_basis_);
  q_perp_ = complement(q_basis_);
}

double ProductSpace::inner(const ProductVector& x, const ProductVector& y) const {
  double s = 0.0;
  for (int k = 0; k < n(); ++k) s += lam_.lambdas[k] * component(x, k).dot(component(y, k));
  return s;
}

Eigen::VectorXd ProductSpace::metric_diagonal() const {
  Eigen::VectorXd d(pdim());
  for (int k = 0; k < n(); ++k)
    d.segment(k * adim(), adim()).setConstant(lam_.lambdas[k]);
  return d;
}

ProductVector ProductSpace::twist_apply(const ProductVector& x) const {
  ProductVector out(pdim());
  out.segment(0, adim()) = aut_.matrix * component(x, n() - 1);
  for (int k = 1; k < n(); ++k) out.segment(k * adim(), adim()) = component(x, k - 1);
  return out;
}

ProductVector ProductSpace::twist_transpose_apply(const ProductVector& x) const {
  ProductVector out(pdim());
  const Eigen::VectorXd& lam = lam_.lambdas;
  for (int k = 0; k + 1 < n(); ++k)
    out.segment(k * adim(), adim()) = (lam[k + 1] / lam[k]) * component(x, k + 1);
  out.segment((n() - 1) * adim(), adim()) =
      (lam[0] / lam[n() - 1]) * (aut_.matrix.transpose() * component(x, 0));
  return out;
}

ProductVector ProductSpace::exp_ad_q(const AlgebraVector& q, const ProductVector& x,
                                     double sign) const {
  ProductVector out(pdim());
  for (int k = 0; k < n(); ++k) {
    AlgebraVector qk = q / lam_.lambdas[k];
    out.segment(k * adim(), adim()) =
        exp_ad_cartan(*alg_, qk, component(x, k), sign);
  }
  return out;
}

namespace {
Eigen::VectorXd project_onto(const Eigen::MatrixXd& basis, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& x) {
  // basis columns orthonormal w.r.t. diag(w^2); coords = B^T diag(w^2) x
  Eigen::VectorXd coords = basis.transpose() * (w.array().square().matrix().asDiagonal() * x);
  return basis * coords;
}
}  // namespace

ProductVector ProductSpace::project_K(const ProductVector& x) const {
  Eigen::VectorXd w = metric_diagonal().cwiseSqrt();
  return project_onto(k_basis_, w, x);
}

ProductVector ProductSpace::project_Q(const ProductVector& x) const {
  Eigen::VectorXd w = metric_diagonal().cwiseSqrt();
  return project_onto(q_basis_, w, x);
}

ProductVector ProductSpace::project_K_perp(const ProductVector& x) const {
  return x - project_K(x);
}

ProductVector ProductSpace::project_Q_perp(const ProductVector& x) const {
  return x - project_Q(x);
}

ProductVector ProductSpace::q_lift(const AlgebraVector& q) const {
  ProductVector out(pdim());
  for (int k = 0; k < n(); ++k) out.segment(k * adim(), adim()) = q / lam_.lambdas[k];
  return out;
}

AlgebraVector ProductSpace::q_drop(const ProductVector& x) const {
  AlgebraVector s = AlgebraVector::Zero(adim());
  for (int k = 0; k < n(); ++k) s += component(x, k);
  return t_fix_ * (t_fix_.transpose() * s);
}

Eigen::MatrixXd ProductSpace::constraint_matrix_full(const AlgebraVector& q) const {
  int nd = pdim(), d = adim();
  const Eigen::VectorXd& lam = lam_.lambdas;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nd, nd);
  // Gamma'^T blocks
  for (int k = 0; k + 1 < n(); ++k)
    m.block(k * d, (k + 1) * d, d, d) =
        (lam[k + 1] / lam[k]) * Eigen::MatrixXd::Identity(d, d);
  m.block((n() - 1) * d, 0, d, d) = (lam[0] / lam[n() - 1]) * aut_.matrix.transpose();
  // minus the block-diagonal rotation e^{-ad_{q/lambda_k}}
  for (int k = 0; k < n(); ++k) {
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
    AlgebraVector qk = q / lam[k];
    for (int p = 0; p < alg_->npos; ++p) {
      double th = -alg_->theta(p, qk);
      int yi = alg_->y_index(p), zi = alg_->z_index(p);
      rot(yi, yi) = std::cos(th);
      rot(yi, zi) = std::sin(th);
      rot(zi, yi) = -std::sin(th);
      rot(zi, zi) = std::cos(th);
    }
    m.block(k * d, k * d, d, d) -= rot;
  }
  return m;
}

Eigen::MatrixXd ProductSpace::deformation_matrix_full(const AlgebraVector& q) const {
  int nd = pdim(), d = adim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(nd, nd);
  // e^{-ad_qvec} Gamma': column block k feeds component k+1 (and N-1 -> 0).
  Eigen::MatrixXd gp = Eigen::MatrixXd::Zero(nd, nd);
  for (int k = 1; k < n(); ++k)
    gp.block(k * d, (k - 1) * d, d, d) = Eigen::MatrixXd::Identity(d, d);
  gp.block(0, (n() - 1) * d, d, d) = aut_.matrix;
  for (int k = 0; k < n(); ++k) {
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
    AlgebraVector qk = q / lam_.lambdas[k];
    for (int p = 0; p < alg_->npos; ++p) {
      double th = -alg_->theta(p, qk);
      int yi = alg_->y_index(p), zi = alg_->z_index(p);
      rot(yi, yi) = std::cos(th);
      rot(yi, zi) = std::sin(th);
      rot(zi, yi) = -std::sin(th);
      rot(zi, zi) = std::cos(th);
    }
    m.block(k * d, 0, d, nd) -= rot * gp.block(k * d, 0, d, nd);
  }
  return m;
}

Eigen::MatrixXd ProductSpace::lambda_transpose(const Eigen::MatrixXd& m) const {
  Eigen::VectorXd w = metric_diagonal();
  return w.cwiseInverse().asDiagonal() * m.transpose() * w.asDiagonal();
}

Eigen::MatrixXd ProductSpace::constraint_operator(const AlgebraVector& q) const {
  if (alcove_margin(*alg_, aut_, q) < 1e-8)
    throw NonGenericError("constraint operator: q is on (or too close to) an alcove wall");
  Eigen::MatrixXd full = constraint_matrix_full(q);
  Eigen::VectorXd w2 = metric_diagonal();
  // coords in K^perp of (full * Q_perp coords)
  return k_perp_.transpose() * w2.asDiagonal() * full * q_perp_;
}

ProductVector ProductSpace::constraint_solve(const AlgebraVector& q,
                                             const ProductVector& eta) const {
  double knorm = project_K(eta).norm();
  if (knorm > 1e-8 * std::max(1.0, eta.norm()))
    throw ValidationError("constraint_solve: right-hand side has a K-component");
  Eigen::MatrixXd z = constraint_operator(q);
  Eigen::VectorXd rhs = k_perp_.transpose() * (metric_diagonal().asDiagonal() * eta);
  Eigen::VectorXd sol = z.partialPivLu().solve(rhs);
  ProductVector out = q_perp_ * sol;
  double res = (constraint_matrix_full(q) * out - eta).norm();
  if (res > 1e-9 * std::max(1.0, eta.norm()))
    throw NumericalError("constraint_solve: residual " + std::to_string(res));
  return out;
}

ProductVector ProductSpace::solve_momentum_constraint(const AlgebraVector& q,
                                                      const AlgebraVector& p,
                                                      const ProductVector& xi) const {
  if (project_K(xi).norm() > 1e-8 * std::max(1.0, xi.norm()))
    throw ValidationError("momentum constraint infeasible: xi_K != 0");
  return q_lift(p) - constraint_solve(q, xi);
}

double ProductSpace::constraint_residual(const AlgebraVector& q,
                                         const ProductVector& j,
                                         const ProductVector& xi) const {
  return (constraint_matrix_full(q) * j + xi).norm();
}

double ProductSpace::hamiltonian_constraint_form(const ReducedPoint& pt) const {
  ProductVector z = constraint_solve(pt.q, project_K_perp(pt.xi));
  return 0.5 * pt.p.dot(pt.p) + 0.5 * inner(z, z);
}

double ProductSpace::hamiltonian_deformation_form(const ReducedPoint& pt) const {
  // 1/2 <xi, (U^T U)^{-1} xi> with U = deformation operator K^perp -> Q^perp.
  Eigen::MatrixXd u_full = deformation_matrix_full(pt.q);
  Eigen::VectorXd w2 = metric_diagonal();
  Eigen::MatrixXd u = q_perp_.transpose() * w2.asDiagonal() * u_full * k_perp_;
  Eigen::MatrixXd utu = u.transpose() * u;
  Eigen::VectorXd xi_coords = k_perp_.transpose() * (w2.asDiagonal() * pt.xi);
  Eigen::VectorXd sol = utu.ldlt().solve(xi_coords);
  return 0.5 * pt.p.dot(pt.p) + 0.5 * xi_coords.dot(sol);
}

ProductVector ProductSpace::residual_gauge(const AlgebraVector& t,
                                           const ProductVector& x) const {
  ProductVector out(pdim());
  for (int k = 0; k < n(); ++k)
    out.segment(k * adim(), adim()) = exp_ad_cartan(*alg_, t, component(x, k));
  return out;
}

void ProductSpace::validate(const ReducedPoint& pt, double tol) const {
  if (pt.q.size() != adim() || pt.p.size() != adim() || pt.xi.size() != pdim())
    throw ValidationError("reduced point: shape mismatch");
  if (!alcove_contains(*alg_, aut_, pt.q))
    throw ValidationError("reduced point: q outside the open alcove");
  if ((pt.p - t_fix_ * (t_fix_.transpose() * pt.p)).norm() >
      tol * std::max(1.0, pt.p.norm()))
    throw ValidationError("reduced point: p not in T^gamma");
  if (project_K(pt.xi).norm() > tol * std::max(1.0, pt.xi.norm()))
    throw ValidationError("reduced point: xi has a K-component");
}

ProductVector random_orbit_spin(const ProductSpace& space, Rng& rng, double scale) {
  const SimpleLieAlgebra& alg = space.algebra();
  ProductVector xi(space.pdim());
  for (int k = 0; k < space.n(); ++k) {
    AlgebraVector seed = gaussian_vector(rng, alg.dim, scale);
    AlgebraVector dress = gaussian_vector(rng, alg.dim, 0.7);
    xi.segment(k * alg.dim, alg.dim) = expm_skew(alg.ad_of(dress)) * seed;
  }
  // Shift the Cartan part of the last component so that xi_K = 0; the last
  // orbit is defined by the shifted element.
  ProductVector pk = space.project_K(xi);
  AlgebraVector corr = space.component(pk, 0) * 0.0;
  for (int k = 0; k < space.n(); ++k)
    corr += space.coupling().lambdas[k] * space.component(xi, k);
  Eigen::MatrixXd tf = space.fixed_cartan();
  corr = tf * (tf.transpose() * corr);
  xi.segment((space.n() - 1) * alg.dim, alg.dim) -=
      corr / space.coupling().lambdas[space.n() - 1];
  if (space.project_K(xi).norm() > 1e-10 * std::max(1.0, xi.norm()))
    throw NumericalError("orbit spin: K-component did not cancel");
  return xi;
}

ReducedPoint random_reduced_point(const ProductSpace& space, Rng& rng,
                                  double spin_scale, double alcove_margin) {
  ReducedPoint pt;
  pt.q = random_alcove_point(space.algebra(), space.automorphism(), rng, alcove_margin);
  Eigen::MatrixXd tf = space.fixed_cartan();
  pt.p = tf * gaussian_vector(rng, static_cast<int>(tf.cols()));
  pt.xi = random_orbit_spin(space, rng, spin_scale);
  return pt;
}

Eigen::VectorXd orbit_invariants(const SimpleLieAlgebra& alg, const AlgebraVector& xi) {
  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXcd h = im * alg.ad_of(xi).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

}  // namespace twistred
