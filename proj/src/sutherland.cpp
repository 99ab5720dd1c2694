#include "twistred/sutherland.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace twistred {

namespace {

const std::complex<double> im(0.0, 1.0);

double wrap_distance_2pi(double x) {
  double r = std::remainder(x, 2.0 * M_PI);
  return std::abs(r);
}

void require_identity_twist(const ProductSpace& space, const char* what) {
  if (!space.automorphism().is_identity())
    throw ValidationError(std::string(what) +
                          ": closed form requires the identity automorphism");
}

}  // namespace

Eigen::MatrixXcd hopping_matrix(double x, const CouplingVector& lam) {
  int n = lam.n();
  const Eigen::VectorXd& l = lam.lambdas;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    int ip = (i + 1) % n;
    int imn = (i - 1 + n) % n;
    m(i, i) += l[i] + l[ip];
    m(i, imn) += -l[i] * std::exp(-im * x / l[i]);
    m(i, ip) += -l[ip] * std::exp(im * x / l[ip]);
  }
  return m;
}

Eigen::MatrixXcd hopping_inverse(double x, const CouplingVector& lam) {
  if (wrap_distance_2pi(x) < 1e-8)
    throw NonGenericError("hopping_inverse: argument within guard band of 2*pi*Z");
  int n = lam.n();
  double s = std::sin(x / 2.0);
  double cot = std::cos(x / 2.0) / s;
  double s2 = 0.25 / (s * s);
  Eigen::MatrixXcd p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double b = lam.b_diff(i, j);
      p(i, j) = std::exp(-im * b * x) *
                (s2 + im * (b / 2.0) * cot - std::abs(b) / 2.0);
    }
  }
  return p;
}

Eigen::MatrixXcd hopping_inverse_dx(double x, const CouplingVector& lam) {
  if (wrap_distance_2pi(x) < 1e-8)
    throw NonGenericError("hopping_inverse_dx: argument within guard band of 2*pi*Z");
  int n = lam.n();
  double s = std::sin(x / 2.0);
  double cot = std::cos(x / 2.0) / s;
  double s2 = 0.25 / (s * s);
  Eigen::MatrixXcd p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double b = lam.b_diff(i, j);
      std::complex<double> inner = s2 + im * (b / 2.0) * cot - std::abs(b) / 2.0;
      std::complex<double> dinner = -s2 * cot - im * (b / 4.0) / (s * s);
      p(i, j) = std::exp(-im * b * x) * (-im * b * inner + dinner);
    }
  }
  return p;
}

Eigen::MatrixXd cartan_coupling_matrix(const CouplingVector& lam) {
  int n = lam.n();
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double b = lam.b_diff(i, j);
      p(i, j) = (b * b - std::abs(b)) / 2.0;
    }
  }
  return p;
}

Eigen::MatrixXcd zero_mode_projector(const CouplingVector& lam) {
  int n = lam.n();
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
  double lsum = lam.lambdas.sum();
  Eigen::MatrixXcd pn =
      ones * (lam.lambdas.cast<std::complex<double>>().transpose()) / lsum;
  return Eigen::MatrixXcd::Identity(n, n) - pn;
}

Eigen::MatrixXd hopping_zero_mode_inverse(const CouplingVector& lam) {
  Eigen::MatrixXcd pi = zero_mode_projector(lam);
  Eigen::MatrixXcd res = pi * cartan_coupling_matrix(lam) *
                         lam.lambdas.asDiagonal() * pi;
  if (res.imag().norm() > 1e-12)
    throw NumericalError("zero-mode inverse picked up an imaginary part");
  return res.real();
}

SpinChargeBlock spin_charges(const ProductSpace& space, const ProductVector& xi) {
  const SimpleLieAlgebra& alg = space.algebra();
  const double s2 = std::sqrt(2.0);
  int n = space.n();
  SpinChargeBlock blk;
  blk.c.resize(alg.npos, n);
  blk.t.resize(alg.rank, n);
  for (int k = 0; k < n; ++k) {
    double l = space.coupling().lambdas[k];
    auto xk = space.component(xi, k);
    for (int p = 0; p < alg.npos; ++p) {
      double y = xk[alg.y_index(p)], z = xk[alg.z_index(p)];
      blk.c(p, k) = l * std::complex<double>(z, -y) / s2;
    }
    for (int j = 0; j < alg.rank; ++j) blk.t(j, k) = l * xk[j];
  }
  return blk;
}

ProductVector spin_metric_apply(const ProductSpace& space, const AlgebraVector& q,
                                const ProductVector& x) {
  require_identity_twist(space, "spin_metric_apply");
  const SimpleLieAlgebra& alg = space.algebra();
  const CouplingVector& lam = space.coupling();
  const double s2 = std::sqrt(2.0);
  int n = space.n();
  Eigen::VectorXd linv = lam.lambdas.cwiseInverse();
  ProductVector out = ProductVector::Zero(space.pdim());

  Eigen::MatrixXcd m0 = hopping_matrix(0.0, lam);
  for (int j = 0; j < alg.rank; ++j) {
    Eigen::VectorXcd t(n);
    for (int k = 0; k < n; ++k) t[k] = space.component(x, k)[j];
    Eigen::VectorXcd tp = linv.asDiagonal() * (m0 * t);
    for (int k = 0; k < n; ++k) out[k * alg.dim + j] = tp[k].real();
  }
  for (int p = 0; p < alg.npos; ++p) {
    Eigen::MatrixXcd m = hopping_matrix(alg.theta(p, q), lam);
    Eigen::VectorXcd beta(n);
    for (int k = 0; k < n; ++k) {
      auto xk = space.component(x, k);
      beta[k] = std::complex<double>(xk[alg.z_index(p)], xk[alg.y_index(p)]) / s2;
    }
    Eigen::VectorXcd bp = linv.asDiagonal() * (m * beta);
    for (int k = 0; k < n; ++k) {
      out[k * alg.dim + alg.y_index(p)] = s2 * bp[k].imag();
      out[k * alg.dim + alg.z_index(p)] = s2 * bp[k].real();
    }
  }
  return out;
}

namespace {

// Spin potential V(q, xi) of the closed form, with optional gradients.
// Root channel phi:  E_phi = sum_{IJ} Re[ P_{IJ}(i x_phi) a_I conj(a_J) ],
// a_I = lambda_I (z_I - i y_I)/sqrt(2); Cartan part through P'.
struct SpinPotential {
  double value = 0.0;
  Eigen::VectorXd dv_dq;       // via analytic dP/dx (rank entries)
  ProductVector grad_xi;       // plain per-component gradient
};

SpinPotential spin_potential(const ProductSpace& space, const ReducedPoint& pt,
                             bool want_gradients) {
  const SimpleLieAlgebra& alg = space.algebra();
  const CouplingVector& lam = space.coupling();
  const double s2 = std::sqrt(2.0);
  int n = space.n();
  SpinPotential out;
  if (want_gradients) {
    out.dv_dq = Eigen::VectorXd::Zero(alg.rank);
    out.grad_xi = ProductVector::Zero(space.pdim());
  }

  // Cartan charges
  Eigen::MatrixXd pprime = cartan_coupling_matrix(lam);
  for (int j = 0; j < alg.rank; ++j) {
    Eigen::VectorXd t(n);
    for (int k = 0; k < n; ++k)
      t[k] = lam.lambdas[k] * space.component(pt.xi, k)[j];
    Eigen::VectorXd pt_ = pprime * t;
    out.value += 0.5 * t.dot(pt_);
    if (want_gradients)
      for (int k = 0; k < n; ++k)
        out.grad_xi[k * alg.dim + j] += lam.lambdas[k] * pt_[k];
  }

  // Root charges
  for (int p = 0; p < alg.npos; ++p) {
    double x = alg.theta(p, pt.q);
    Eigen::MatrixXcd pm = hopping_inverse(x, lam);
    Eigen::VectorXcd a(n);
    for (int k = 0; k < n; ++k) {
      auto xk = space.component(pt.xi, k);
      a[k] = lam.lambdas[k] *
             std::complex<double>(xk[alg.z_index(p)], -xk[alg.y_index(p)]) / s2;
    }
    std::complex<double> e = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e += pm(i, j) * a[i] * std::conj(a[j]);
    out.value += e.real();
    if (!want_gradients) continue;

    Eigen::MatrixXcd dpm = hopping_inverse_dx(x, lam);
    std::complex<double> de = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) de += dpm(i, j) * a[i] * std::conj(a[j]);
    out.dv_dq += de.real() * alg.root_angle.row(p).transpose();

    // dE = sum_K Re[G_K da_K], G = 2 P conj(a) for Hermitian P
    Eigen::VectorXcd g = 2.0 * (pm * a.conjugate());
    for (int k = 0; k < n; ++k) {
      double lk = lam.lambdas[k];
      out.grad_xi[k * alg.dim + alg.y_index(p)] += (lk / s2) * g[k].imag();
      out.grad_xi[k * alg.dim + alg.z_index(p)] += (lk / s2) * g[k].real();
    }
  }
  return out;
}

}  // namespace

double hamiltonian_closed_form(const ProductSpace& space, const ReducedPoint& pt) {
  require_identity_twist(space, "hamiltonian_closed_form");
  return 0.5 * pt.p.dot(pt.p) + spin_potential(space, pt, false).value;
}

Eigen::VectorXd hamiltonian_q_gradient(const ProductSpace& space,
                                       const ReducedPoint& pt) {
  require_identity_twist(space, "hamiltonian_q_gradient");
  return spin_potential(space, pt, true).dv_dq;
}

ReducedRhs reduced_vector_field(const ProductSpace& space, const ReducedPoint& pt) {
  require_identity_twist(space, "reduced_vector_field");
  const SimpleLieAlgebra& alg = space.algebra();
  SpinPotential sp = spin_potential(space, pt, true);
  ReducedRhs rhs;
  rhs.qdot = pt.p;
  rhs.pdot = AlgebraVector::Zero(alg.dim);
  rhs.pdot.head(alg.rank) = -sp.dv_dq;
  rhs.xidot = ProductVector::Zero(space.pdim());
  for (int k = 0; k < space.n(); ++k) {
    AlgebraVector g =
        sp.grad_xi.segment(k * alg.dim, alg.dim) / space.coupling().lambdas[k];
    rhs.xidot.segment(k * alg.dim, alg.dim) =
        bracket(alg, g, space.component(pt.xi, k));
  }
  return rhs;
}

namespace {

// Dormand-Prince 5(4) pair.
struct Rk45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  // stage coefficients
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

struct FlowState {
  Eigen::VectorXd y;  // [q_T (rank), p_T (rank), xi (N*dim)]
};

ReducedPoint unpack(const ProductSpace& space, const Eigen::VectorXd& y) {
  const SimpleLieAlgebra& alg = space.algebra();
  ReducedPoint pt;
  pt.q = AlgebraVector::Zero(alg.dim);
  pt.p = AlgebraVector::Zero(alg.dim);
  pt.q.head(alg.rank) = y.segment(0, alg.rank);
  pt.p.head(alg.rank) = y.segment(alg.rank, alg.rank);
  pt.xi = y.segment(2 * alg.rank, space.pdim());
  return pt;
}

Eigen::VectorXd pack_rhs(const ProductSpace& space, const ReducedRhs& rhs) {
  const SimpleLieAlgebra& alg = space.algebra();
  Eigen::VectorXd dy(2 * alg.rank + space.pdim());
  dy.segment(0, alg.rank) = rhs.qdot.head(alg.rank);
  dy.segment(alg.rank, alg.rank) = rhs.pdot.head(alg.rank);
  dy.segment(2 * alg.rank, space.pdim()) = rhs.xidot;
  return dy;
}

}  // namespace

Trajectory integrate_reduced(const ProductSpace& space, const ReducedPoint& start,
                             const std::vector<double>& t_grid,
                             const IntegratorOptions& opt) {
  require_identity_twist(space, "integrate_reduced");
  space.validate(start);
  const SimpleLieAlgebra& alg = space.algebra();
  DiagramAutomorphism id_aut = identity_automorphism(alg);

  auto f = [&](const Eigen::VectorXd& y) {
    ReducedPoint pt = unpack(space, y);
    if (alcove_margin(alg, id_aut, pt.q) < opt.wall_guard)
      throw NonGenericError("flow reached the alcove guard band");
    return pack_rhs(space, reduced_vector_field(space, pt));
  };

  Trajectory traj;
  Eigen::VectorXd y(2 * alg.rank + space.pdim());
  y.segment(0, alg.rank) = start.q.head(alg.rank);
  y.segment(alg.rank, alg.rank) = start.p.head(alg.rank);
  y.segment(2 * alg.rank, space.pdim()) = start.xi;

  double h = opt.h_init;
  double t = t_grid.empty() ? 0.0 : t_grid.front();
  double e0 = hamiltonian_closed_form(space, start);
  long steps = 0;

  auto sample = [&](double tt, const Eigen::VectorXd& yy) {
    ReducedPoint pt = unpack(space, yy);
    double e = hamiltonian_closed_form(space, pt);
    traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(e - e0));
    traj.samples.push_back({tt, pt, e});
  };

  for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
    double target = t_grid[gi];
    if (gi == 0 && std::abs(target - t) < 1e-15) {
      sample(t, y);
      continue;
    }
    bool truncated = false;
    while (t < target - 1e-14) {
      double hstep = std::min(h, target - t);
      Eigen::VectorXd k1, k2, k3, k4, k5, k6, k7, y5;
      try {
        k1 = f(y);
        k2 = f(y + hstep * (Rk45::a21 * k1));
        k3 = f(y + hstep * (Rk45::a31 * k1 + Rk45::a32 * k2));
        k4 = f(y + hstep * (Rk45::a41 * k1 + Rk45::a42 * k2 + Rk45::a43 * k3));
        k5 = f(y + hstep * (Rk45::a51 * k1 + Rk45::a52 * k2 + Rk45::a53 * k3 +
                            Rk45::a54 * k4));
        k6 = f(y + hstep * (Rk45::a61 * k1 + Rk45::a62 * k2 + Rk45::a63 * k3 +
                            Rk45::a64 * k4 + Rk45::a65 * k5));
        y5 = y + hstep * (Rk45::b1 * k1 + Rk45::b3 * k3 + Rk45::b4 * k4 +
                          Rk45::b5 * k5 + Rk45::b6 * k6);
        k7 = f(y5);
      } catch (const NonGenericError&) {
        if (hstep > opt.h_min * 4) {
          h = hstep / 4;
          continue;
        }
        truncated = true;
        break;
      }
      Eigen::VectorXd err = hstep * (Rk45::e1 * k1 + Rk45::e3 * k3 + Rk45::e4 * k4 +
                                     Rk45::e5 * k5 + Rk45::e6 * k6 + Rk45::e7 * k7);
      double scale = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        double s = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        scale += (err[i] / s) * (err[i] / s);
      }
      double enorm = std::sqrt(scale / y.size());
      if (enorm <= 1.0) {
        t += hstep;
        y = y5;
      }
      double fac = enorm > 0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
      h = hstep * std::clamp(fac, 0.2, 5.0);
      if (h < opt.h_min) {
        truncated = true;
        break;
      }
      if (++steps > opt.max_steps)
        throw NumericalError("integrate_reduced: step limit exceeded");
    }
    if (truncated) {
      traj.status = "truncated";
      traj.truncated_at = t;
      break;
    }
    sample(target, y);
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const ProductSpace& space,
                          const Trajectory& traj) {
  const SimpleLieAlgebra& alg = space.algebra();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open trajectory output file " + path);
  out << "t";
  for (int j = 0; j < alg.rank; ++j) out << ",q" << j;
  for (int j = 0; j < alg.rank; ++j) out << ",p" << j;
  out << ",H";
  for (int k = 0; k < space.n(); ++k) out << ",orb" << k << "_c2,orb" << k << "_c4";
  out << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& s : traj.samples) {
    put(s.t);
    for (int j = 0; j < alg.rank; ++j) {
      out << ",";
      put(s.point.q[j]);
    }
    for (int j = 0; j < alg.rank; ++j) {
      out << ",";
      put(s.point.p[j]);
    }
    out << ",";
    put(s.energy);
    for (int k = 0; k < space.n(); ++k) {
      AlgebraVector xk = space.component(s.point.xi, k);
      Eigen::MatrixXd ad = alg.ad_of(xk);
      out << ",";
      put(xk.dot(xk));
      out << ",";
      put((ad * ad * ad * ad).trace());
    }
    out << "\n";
  }
}

}  // namespace twistred
