#include "twistred/projection_dynamics.hpp"

namespace twistred {

namespace {

const std::complex<double> im(0.0, 1.0);

// <A,B> = -tr(AB) for anti-Hermitian arguments (real, positive definite).
double mat_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return -(a * b).trace().real();
}

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a * b - b * a;
}

// Projection onto traceless anti-Hermitian matrices.
Eigen::MatrixXcd project_su(const Eigen::MatrixXcd& m) {
  int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd a = (m - m.adjoint()) / 2.0;
  return a - (a.trace() / static_cast<double>(n)) * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace

ProjectionSystem::ProjectionSystem(const SunRealization& real, CouplingVector coupling,
                                   GroupTwist twist)
    : real_(&real), lam_(std::move(coupling)), twist_(twist) {
  if (twist_ == GroupTwist::Identity) {
    model_ = std::make_unique<ProductSpace>(
        real.algebra(), identity_automorphism(real.algebra()), lam_);
  }
}

const ProductSpace& ProjectionSystem::reduced_model() const {
  if (!model_)
    throw ValidationError("reduced model requires the identity twist");
  return *model_;
}

Eigen::MatrixXcd ProjectionSystem::group_twist_apply(const Eigen::MatrixXcd& g) const {
  return twist_ == GroupTwist::Identity ? g : g.conjugate();
}

Eigen::MatrixXcd ProjectionSystem::algebra_twist_apply(const Eigen::MatrixXcd& x) const {
  return twist_ == GroupTwist::Identity ? x : x.conjugate();
}

Eigen::MatrixXcd ProjectionSystem::algebra_twist_inverse(const Eigen::MatrixXcd& x) const {
  return algebra_twist_apply(x);  // entrywise conjugation is an involution
}

double ProjectionSystem::weighted_inner(const MatrixList& x, const MatrixList& y) const {
  double s = 0.0;
  for (int k = 0; k < n(); ++k) s += lam_.lambdas[k] * mat_inner(x[k], y[k]);
  return s;
}

double ProjectionSystem::hamiltonian(const UnreducedPoint& pt) const {
  return 0.5 * weighted_inner(pt.j, pt.j);
}

UnreducedPoint ProjectionSystem::free_flow(double t, const UnreducedPoint& pt) const {
  UnreducedPoint out = pt;
  for (int k = 0; k < n(); ++k) out.g[k] = sun_exp(t * pt.j[k]) * pt.g[k];
  return out;
}

MatrixList ProjectionSystem::momentum_map(const UnreducedPoint& pt) const {
  MatrixList psi(n());
  for (int k = 0; k < n(); ++k) {
    Eigen::MatrixXcd gt;
    if (k + 1 < n())
      gt = (lam_.lambdas[k + 1] / lam_.lambdas[k]) * pt.j[k + 1];
    else
      gt = (lam_.lambdas[0] / lam_.lambdas[n() - 1]) * algebra_twist_inverse(pt.j[0]);
    psi[k] = gt - pt.g[k].adjoint() * pt.j[k] * pt.g[k] + pt.xi[k];
  }
  return psi;
}

double ProjectionSystem::momentum_residual(const UnreducedPoint& pt) const {
  MatrixList psi = momentum_map(pt);
  double s = 0.0;
  for (auto& m : psi) s += m.squaredNorm();
  return std::sqrt(s);
}

Eigen::MatrixXcd ProjectionSystem::monodromy(const MatrixList& g) const {
  Eigen::MatrixXcd m = g[0];
  for (std::size_t k = 1; k < g.size(); ++k) m = m * g[k];
  return m;
}

MatrixList ProjectionSystem::twisted_conjugate(const MatrixList& eta,
                                               const MatrixList& g) const {
  MatrixList out(n());
  out[0] = group_twist_apply(eta[n() - 1]) * g[0] * eta[0].adjoint();
  for (int k = 1; k < n(); ++k) out[k] = eta[k - 1] * g[k] * eta[k].adjoint();
  return out;
}

UnreducedPoint ProjectionSystem::extended_action(const MatrixList& eta,
                                                 const UnreducedPoint& pt) const {
  UnreducedPoint out;
  out.g = twisted_conjugate(eta, pt.g);
  out.j.resize(n());
  out.xi.resize(n());
  // Gamma(eta) = (gamma(eta_N), eta_1, ..., eta_{N-1})
  for (int k = 0; k < n(); ++k) {
    Eigen::MatrixXcd h = (k == 0) ? group_twist_apply(eta[n() - 1]) : eta[k - 1];
    out.j[k] = h * pt.j[k] * h.adjoint();
    out.xi[k] = eta[k] * pt.xi[k] * eta[k].adjoint();
  }
  return out;
}

MatrixList ProjectionSystem::reconstruct_gauge(const MatrixList& g,
                                               const MatrixList& gprime,
                                               const Eigen::MatrixXcd& eta_n) const {
  MatrixList eta(n());
  eta[n() - 1] = eta_n;
  for (int k = n() - 1; k >= 1; --k)
    eta[k - 1] = gprime[k] * eta[k] * g[k].adjoint();
  return eta;
}

MatrixList ProjectionSystem::reconstruct_gauge(const MatrixList& g,
                                               const Eigen::MatrixXcd& eta_n) const {
  return reconstruct_gauge(g, g, eta_n);
}

UnreducedPoint ProjectionSystem::unreduce(const ReducedPoint& rp) const {
  const ProductSpace& sp = reduced_model();
  ProductVector jvec = sp.solve_momentum_constraint(rp.q, rp.p, rp.xi);
  UnreducedPoint pt;
  pt.g.resize(n());
  pt.j.resize(n());
  pt.xi.resize(n());
  for (int k = 0; k < n(); ++k) {
    pt.g[k] = sun_exp(real_->to_matrix(rp.q / lam_.lambdas[k]));
    pt.j[k] = real_->to_matrix(sp.component(jvec, k));
    pt.xi[k] = real_->to_matrix(sp.component(rp.xi, k));
  }
  return pt;
}

ReducedPoint ProjectionSystem::reduce_point(const UnreducedPoint& pt) const {
  const ProductSpace& sp = reduced_model();
  double scale = std::sqrt(std::abs(weighted_inner(pt.j, pt.j)) + 1.0);
  if (momentum_residual(pt) > 1e-8 * scale)
    throw ValidationError("reduce_point: momentum map constraint violated");

  AlcoveProjection proj = alcove_project(*real_, monodromy(pt.g));
  MatrixList gslice(n());
  for (int k = 0; k < n(); ++k)
    gslice[k] = sun_exp(real_->to_matrix(proj.q / lam_.lambdas[k]));
  MatrixList eta = reconstruct_gauge(pt.g, gslice, proj.w);
  UnreducedPoint moved = extended_action(eta, pt);
  for (int k = 0; k < n(); ++k)
    if ((moved.g[k] - gslice[k]).norm() > 1e-7)
      throw NumericalError("reduce_point: gauge transport missed the slice");

  ReducedPoint rp;
  rp.q = proj.q;
  Eigen::MatrixXcd jsum = Eigen::MatrixXcd::Zero(matrix_dim(), matrix_dim());
  for (int k = 0; k < n(); ++k) jsum += moved.j[k];
  AlgebraVector jsum_alg = real_->from_matrix(jsum, 1e-7);
  Eigen::MatrixXd tf = sp.fixed_cartan();
  rp.p = tf * (tf.transpose() * jsum_alg);
  rp.xi = ProductVector(sp.pdim());
  for (int k = 0; k < n(); ++k)
    rp.xi.segment(k * sp.adim(), sp.adim()) = real_->from_matrix(moved.xi[k], 1e-7);
  if (sp.project_K(rp.xi).norm() > 1e-7 * std::max(1.0, rp.xi.norm()))
    throw NumericalError("reduce_point: transported spin has a K-component");
  return rp;
}

MatrixList ProjectionSystem::charge_field(const UnreducedPoint& pt, double u) const {
  if (u == 0.0) throw ValidationError("charge_field: u must be nonzero");
  MatrixList out(n());
  for (int k = 0; k < n(); ++k)
    out[k] = -pt.g[k].adjoint() * pt.j[k] * pt.g[k] + pt.xi[k] / u;
  return out;
}

double ProjectionSystem::poisson_bracket(const Observable& f, const Observable& g,
                                         const UnreducedPoint& pt) const {
  PhaseGradient a = f(pt), b = g(pt);
  double s = 0.0;
  s += weighted_inner(a.dg, b.dj) - weighted_inner(b.dg, a.dj);
  MatrixList comm_j(n()), comm_xi(n());
  for (int k = 0; k < n(); ++k) {
    comm_j[k] = commutator(a.dj[k], b.dj[k]);
    comm_xi[k] = commutator(a.dxi[k], b.dxi[k]);
  }
  s += weighted_inner(pt.j, comm_j);
  s += weighted_inner(pt.xi, comm_xi);
  return s;
}

namespace {
MatrixList zero_list(int n, int dim) {
  return MatrixList(n, Eigen::MatrixXcd::Zero(dim, dim));
}
}  // namespace

Observable ProjectionSystem::momentum_observable(const MatrixList& x) const {
  int nn = n(), d = matrix_dim();
  const ProjectionSystem* self = this;
  return [self, x, nn, d](const UnreducedPoint& pt) {
    PhaseGradient out;
    out.value = self->weighted_inner(pt.j, x);
    out.dg = zero_list(nn, d);
    out.dj = x;
    out.dxi = zero_list(nn, d);
    return out;
  };
}

Observable ProjectionSystem::spin_observable(const MatrixList& x) const {
  int nn = n(), d = matrix_dim();
  const ProjectionSystem* self = this;
  return [self, x, nn, d](const UnreducedPoint& pt) {
    PhaseGradient out;
    out.value = self->weighted_inner(pt.xi, x);
    out.dg = zero_list(nn, d);
    out.dj = zero_list(nn, d);
    out.dxi = x;
    return out;
  };
}

Observable ProjectionSystem::charge_component_observable(const MatrixList& x,
                                                         double u) const {
  const ProjectionSystem* self = this;
  return [self, x, u](const UnreducedPoint& pt) {
    PhaseGradient out;
    int nn = self->n(), d = self->matrix_dim();
    MatrixList phi = self->charge_field(pt, u);
    out.value = self->weighted_inner(phi, x);
    out.dg.resize(nn);
    out.dj.resize(nn);
    out.dxi.resize(nn);
    (void)d;
    for (int k = 0; k < nn; ++k) {
      Eigen::MatrixXcd adx = pt.g[k] * x[k] * pt.g[k].adjoint();
      out.dj[k] = -adx;
      out.dxi[k] = x[k] / u;
      out.dg[k] = commutator(pt.j[k], adx);
    }
    return out;
  };
}

Observable ProjectionSystem::charge_trace_observable(int degree, double u) const {
  if (degree < 2) throw ValidationError("charge_trace_observable: degree >= 2");
  const ProjectionSystem* self = this;
  return [self, degree, u](const UnreducedPoint& pt) {
    int nn = self->n();
    MatrixList phi = self->charge_field(pt, u);
    std::complex<double> rot = std::pow(-im, degree);
    PhaseGradient out;
    out.dg.resize(nn);
    out.dj.resize(nn);
    out.dxi.resize(nn);
    for (int k = 0; k < nn; ++k) {
      Eigen::MatrixXcd pw = phi[k];
      for (int m = 1; m < degree - 1; ++m) pw = pw * phi[k];
      // value uses one more power
      out.value += self->lam_.lambdas[k] * (rot * (pw * phi[k]).trace()).real();
      Eigen::MatrixXcd grad = -static_cast<double>(degree) * project_su(rot * pw);
      out.dj[k] = -pt.g[k] * grad * pt.g[k].adjoint();
      out.dxi[k] = grad / u;
      out.dg[k] = commutator(pt.j[k], pt.g[k] * grad * pt.g[k].adjoint());
    }
    return out;
  };
}

Trajectory ProjectionSystem::project_trajectory(const ReducedPoint& start,
                                                const std::vector<double>& t_grid) const {
  const ProductSpace& sp = reduced_model();
  sp.validate(start);
  UnreducedPoint upstairs = unreduce(start);
  Trajectory traj;
  double e0 = hamiltonian(upstairs);
  for (double t : t_grid) {
    UnreducedPoint flowed = free_flow(t, upstairs);
    ReducedPoint rp;
    try {
      rp = reduce_point(flowed);
    } catch (const NonGenericError&) {
      traj.status = "truncated";
      traj.truncated_at = t;
      break;
    }
    double e = hamiltonian(flowed);
    traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(e - e0));
    traj.samples.push_back({t, rp, e});
  }
  return traj;
}

UnreducedPoint ProjectionSystem::random_constrained_point(Rng& rng,
                                                          double spin_scale) const {
  ReducedPoint rp = random_reduced_point(reduced_model(), rng, spin_scale);
  UnreducedPoint pt = unreduce(rp);
  MatrixList eta = random_group_tuple(rng);
  return extended_action(eta, pt);
}

MatrixList ProjectionSystem::random_group_tuple(Rng& rng) const {
  MatrixList eta(n());
  for (int k = 0; k < n(); ++k) eta[k] = random_special_unitary(matrix_dim(), rng);
  return eta;
}

void ProjectionSystem::validate(const UnreducedPoint& pt, double tol) const {
  if (pt.n_factors() != n() || static_cast<int>(pt.j.size()) != n() ||
      static_cast<int>(pt.xi.size()) != n())
    throw ValidationError("unreduced point: wrong number of factors");
  for (int k = 0; k < n(); ++k) {
    if (unitarity_defect(pt.g[k]) > tol ||
        std::abs(pt.g[k].determinant() - 1.0) > tol)
      throw ValidationError("unreduced point: g is not special unitary");
    if ((pt.j[k] + pt.j[k].adjoint()).norm() > tol ||
        std::abs(pt.j[k].trace()) > tol)
      throw ValidationError("unreduced point: momentum not in su(n)");
    if ((pt.xi[k] + pt.xi[k].adjoint()).norm() > tol ||
        std::abs(pt.xi[k].trace()) > tol)
      throw ValidationError("unreduced point: spin not in su(n)");
  }
}

double gradient_check(const ProjectionSystem& sys, const Observable& obs,
                      const UnreducedPoint& pt, Rng& rng, int trials, double step) {
  const SunRealization& real = sys.realization();
  const SimpleLieAlgebra& alg = real.algebra();
  double worst = 0.0;
  PhaseGradient base = obs(pt);
  for (int it = 0; it < trials; ++it) {
    int comp = static_cast<int>(uniform(rng, 0.0, sys.n()));
    comp = std::min(comp, sys.n() - 1);
    Eigen::MatrixXcd x = real.to_matrix(gaussian_vector(rng, alg.dim));
    double lam = sys.coupling().lambdas[comp];

    auto probe = [&](auto&& mutate) {
      UnreducedPoint up = pt, dn = pt;
      mutate(up, step);
      mutate(dn, -step);
      return (obs(up).value - obs(dn).value) / (2 * step);
    };
    // g-direction: left translation by e^{s X}
    double fd_g = probe([&](UnreducedPoint& p, double s) {
      p.g[comp] = sun_exp(s * x) * p.g[comp];
    });
    worst = std::max(worst, std::abs(fd_g - lam * mat_inner(base.dg[comp], x)));
    double fd_j = probe([&](UnreducedPoint& p, double s) { p.j[comp] += s * x; });
    worst = std::max(worst, std::abs(fd_j - lam * mat_inner(base.dj[comp], x)));
    double fd_xi = probe([&](UnreducedPoint& p, double s) { p.xi[comp] += s * x; });
    worst = std::max(worst, std::abs(fd_xi - lam * mat_inner(base.dxi[comp], x)));
  }
  return worst;
}

}  // namespace twistred
