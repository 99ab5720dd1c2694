#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "twistred/sutherland.hpp"

using namespace twistred;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

CouplingVector random_coupling(int n, Rng& rng) {
  VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = uniform(rng, 0.5, 2.5);
  return coupling_from_weights(w);
}

CouplingVector equal_coupling(int n) {
  return CouplingVector(VectorXd::Constant(n, static_cast<double>(n)));
}

ProductSpace make_space(Family f, int rank, const CouplingVector& lam) {
  const SimpleLieAlgebra& alg = algebra_cache(f, rank);
  return ProductSpace(alg, identity_automorphism(alg), lam);
}

}  // namespace

TEST_CASE("hopping matrix entries") {
  SUBCASE("N=1: reduces to 4 sin^2(x/2)") {
    CouplingVector lam = equal_coupling(1);
    Rng rng(1);
    for (int it = 0; it < 20; ++it) {
      double x = uniform(rng, -8.0, 8.0);
      MatrixXcd m = hopping_matrix(x, lam);
      double want = 4.0 * std::pow(std::sin(x / 2.0), 2);
      CHECK(std::abs(m(0, 0) - want) < 1e-13);
    }
  }
  SUBCASE("N=2, lambda=(2,2), x=pi: diag(4,4)") {
    MatrixXcd m = hopping_matrix(M_PI, equal_coupling(2));
    CHECK((m - 4.0 * MatrixXcd::Identity(2, 2)).norm() < 1e-13);
  }
  SUBCASE("Hermitian symmetry and gauged 2pi periodicity") {
    Rng rng(2);
    for (int n : {2, 3, 5}) {
      CouplingVector lam = random_coupling(n, rng);
      double x = uniform(rng, -5.0, 5.0);
      MatrixXcd m = hopping_matrix(x, lam);
      CHECK((m - m.adjoint()).norm() < 1e-12);
      // shifting x by 2pi conjugates by the diagonal phase diag(e^{-2pi i b_I})
      VectorXcd d(n);
      for (int i = 0; i < n; ++i)
        d[i] = std::exp(std::complex<double>(0.0, -2.0 * M_PI * lam.b[i]));
      MatrixXcd gauged = d.asDiagonal() * m * d.conjugate().asDiagonal();
      CHECK((gauged - hopping_matrix(x + 2 * M_PI, lam)).norm() < 1e-11);
      MatrixXcd p = hopping_inverse(x, lam);
      MatrixXcd pg = d.asDiagonal() * p * d.conjugate().asDiagonal();
      CHECK((pg - hopping_inverse(x + 2 * M_PI, lam)).norm() < 1e-11 * p.norm());
    }
  }
}

TEST_CASE("hopping inverse") {
  SUBCASE("N=1 closed form") {
    CouplingVector lam = equal_coupling(1);
    MatrixXcd p = hopping_inverse(1.3, lam);
    CHECK(std::abs(p(0, 0) - 0.25 / std::pow(std::sin(0.65), 2)) < 1e-13);
  }
  SUBCASE("N=2, lambda=(2,2), x=pi: diag(1/4)") {
    MatrixXcd p = hopping_inverse(M_PI, equal_coupling(2));
    CHECK((p - 0.25 * MatrixXcd::Identity(2, 2)).norm() < 1e-13);
  }
  SUBCASE("M * P = Id for 500 seeded random draws, N <= 8") {
    // The closed form is exact; in floating point the product residual grows
    // like eps/sin^2(x/2), so the draws keep distance 0.05 from 2*pi*Z.
    Rng rng(3);
    for (int it = 0; it < 500; ++it) {
      int n = 1 + static_cast<int>(uniform(rng, 0.0, 8.0));
      n = std::min(n, 8);
      CouplingVector lam = random_coupling(n, rng);
      double x = uniform(rng, 0.05, 2 * M_PI - 0.05);
      MatrixXcd mp = hopping_matrix(x, lam) * hopping_inverse(x, lam);
      CHECK((mp - MatrixXcd::Identity(n, n)).norm() < 1e-10);
    }
  }
  SUBCASE("numeric inversion oracle") {
    Rng rng(4);
    for (int it = 0; it < 50; ++it) {
      int n = 2 + it % 4;
      CouplingVector lam = random_coupling(n, rng);
      double x = uniform(rng, 0.2, 2 * M_PI - 0.2);
      MatrixXcd direct = hopping_matrix(x, lam).inverse();
      CHECK((hopping_inverse(x, lam) - direct).norm() < 1e-10 * direct.norm());
    }
  }
  SUBCASE("guard band") {
    CHECK_THROWS_AS(hopping_inverse(2 * M_PI - 1e-9, equal_coupling(2)),
                    NonGenericError);
    CHECK_THROWS_AS(hopping_inverse(1e-10, equal_coupling(2)), NonGenericError);
  }
  SUBCASE("analytic derivative against central differences") {
    Rng rng(5);
    for (int it = 0; it < 30; ++it) {
      int n = 1 + it % 4;
      CouplingVector lam = random_coupling(n, rng);
      double x = uniform(rng, 0.4, 2 * M_PI - 0.4);
      double h = 1e-6;
      MatrixXcd fd =
          (hopping_inverse(x + h, lam) - hopping_inverse(x - h, lam)) / (2 * h);
      CHECK((hopping_inverse_dx(x, lam) - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("degenerate block at x = 0") {
  SUBCASE("N=1: P' = [0]") {
    CHECK(cartan_coupling_matrix(equal_coupling(1)).norm() == 0.0);
  }
  Rng rng(6);
  for (int n : {2, 3, 5, 8}) {
    CouplingVector lam = random_coupling(n, rng);
    Eigen::VectorXd linv = lam.lambdas.cwiseInverse();
    MatrixXcd lm0 = linv.asDiagonal() * hopping_matrix(0.0, lam);

    SUBCASE("kernel of Lambda^{-1} M(0) is span{[1..1]} (SVD)") {
      Eigen::JacobiSVD<MatrixXcd> svd(lm0, Eigen::ComputeFullV);
      int small = 0;
      for (int i = 0; i < n; ++i)
        if (svd.singularValues()[i] < 1e-10) ++small;
      CHECK(small == 1);
      VectorXcd kerv = svd.matrixV().col(n - 1);
      VectorXcd ones = VectorXcd::Ones(n) / std::sqrt(double(n));
      CHECK(std::abs(std::abs(kerv.dot(ones)) - 1.0) < 1e-10);
    }
    SUBCASE("self-adjointness w.r.t. x^* Lambda y") {
      // equivalent statement: M(0) itself is Hermitian
      MatrixXcd m0 = hopping_matrix(0.0, lam);
      CHECK((m0 - m0.adjoint()).norm() < 1e-12);
    }
    SUBCASE("pseudo-inverse identity on the complement of the kernel") {
      MatrixXcd pi = zero_mode_projector(lam);
      MatrixXcd comp = lm0 * hopping_zero_mode_inverse(lam).cast<std::complex<double>>();
      // on N^perp the composition acts as the identity
      CHECK((comp * pi - pi).norm() < 1e-10);
    }
  }
}

TEST_CASE("spin metric operator") {
  Rng rng(7);
  SUBCASE("dense deformation-operator oracle, su(3) N=3") {
    ProductSpace sp = make_space(Family::A, 2, random_coupling(3, rng));
    for (int it = 0; it < 10; ++it) {
      VectorXd q = random_alcove_point(sp.algebra(), sp.automorphism(), rng, 0.05);
      MatrixXd u = sp.deformation_matrix_full(q);
      MatrixXd dense = sp.lambda_transpose(u) * u;
      VectorXd x = gaussian_vector(rng, sp.pdim());
      CHECK((spin_metric_apply(sp, q, x) - dense * x).norm() <
            1e-10 * std::max(1.0, x.norm()));
    }
  }
  SUBCASE("annihilates K and maps into K^perp") {
    // kernel of U = id - e^{-ad} Gamma' is the diagonal torus algebra K
    ProductSpace sp = make_space(Family::A, 1, random_coupling(2, rng));
    VectorXd q = random_alcove_point(sp.algebra(), sp.automorphism(), rng, 0.05);
    VectorXd t = sp.fixed_cartan() *
                 gaussian_vector(rng, static_cast<int>(sp.fixed_cartan().cols()));
    VectorXd diag(sp.pdim());
    for (int k = 0; k < sp.n(); ++k) diag.segment(k * sp.adim(), sp.adim()) = t;
    CHECK(spin_metric_apply(sp, q, diag).norm() < 1e-10);
    VectorXd x = gaussian_vector(rng, sp.pdim());
    CHECK(sp.project_K(spin_metric_apply(sp, q, x)).norm() < 1e-10);
    // q = 0 on the Cartan block reduces to the x = 0 hopping action
    VectorXd tv = gaussian_vector(rng, sp.pdim());
    for (int k = 0; k < sp.n(); ++k)
      tv.segment(k * sp.adim() + sp.algebra().rank,
                 sp.adim() - sp.algebra().rank).setZero();
    VectorXd got = spin_metric_apply(sp, q, tv);
    Eigen::MatrixXcd m0 = hopping_matrix(0.0, sp.coupling());
    for (int j = 0; j < sp.algebra().rank; ++j) {
      Eigen::VectorXcd tj(sp.n());
      for (int k = 0; k < sp.n(); ++k) tj[k] = tv[k * sp.adim() + j];
      Eigen::VectorXcd tjp =
          sp.coupling().lambdas.cwiseInverse().asDiagonal() * (m0 * tj);
      for (int k = 0; k < sp.n(); ++k)
        CHECK(std::abs(got[k * sp.adim() + j] - tjp[k].real()) < 1e-12);
    }
  }
}

TEST_CASE("closed-form Hamiltonian") {
  Rng rng(8);
  SUBCASE("xi = 0 reduces to kinetic energy") {
    ProductSpace sp = make_space(Family::A, 2, equal_coupling(2));
    ReducedPoint pt = random_reduced_point(sp, rng);
    pt.xi.setZero();
    CHECK(hamiltonian_closed_form(sp, pt) ==
          doctest::Approx(0.5 * pt.p.dot(pt.p)).epsilon(1e-14));
  }
  SUBCASE("triple equality with both operator routes") {
    for (auto [f, r, n] : {std::tuple{Family::A, 1, 2}, {Family::A, 2, 3},
                           {Family::A, 3, 2}, {Family::B, 2, 2}}) {
      ProductSpace sp = make_space(f, r, random_coupling(n, rng));
      for (int it = 0; it < 25; ++it) {
        ReducedPoint pt = random_reduced_point(sp, rng);
        double h1 = sp.hamiltonian_constraint_form(pt);
        double h2 = sp.hamiltonian_deformation_form(pt);
        double h3 = hamiltonian_closed_form(sp, pt);
        double scale = std::max(1.0, std::abs(h1));
        CHECK(std::abs(h1 - h2) < 1e-10 * scale);
        CHECK(std::abs(h1 - h3) < 1e-10 * scale);
      }
    }
  }
  SUBCASE("the double root sum is real: explicit complex evaluation") {
    ProductSpace sp = make_space(Family::A, 2, random_coupling(2, rng));
    ReducedPoint pt = random_reduced_point(sp, rng);
    SpinChargeBlock blk = spin_charges(sp, pt.xi);
    const SimpleLieAlgebra& alg = sp.algebra();
    std::complex<double> root_sum = 0.0;
    for (int p = 0; p < alg.npos; ++p) {
      double x = alg.theta(p, pt.q);
      MatrixXcd pm = hopping_inverse(x, sp.coupling());
      MatrixXcd pm_neg = hopping_inverse(-x, sp.coupling());
      for (int i = 0; i < sp.n(); ++i) {
        for (int j = 0; j < sp.n(); ++j) {
          std::complex<double> cp = blk.c(p, i), cm = -std::conj(blk.c(p, j));
          root_sum += pm(i, j) * cp * cm;                          // phi
          root_sum += pm_neg(i, j) * (-std::conj(blk.c(p, i))) * blk.c(p, j);  // -phi
        }
      }
    }
    CHECK(std::abs(root_sum.imag()) < 1e-12 * (1.0 + std::abs(root_sum.real())));
    double direct = hamiltonian_closed_form(sp, pt) - 0.5 * pt.p.dot(pt.p);
    // Cartan part plus the root sum
    Eigen::MatrixXd pprime = cartan_coupling_matrix(sp.coupling());
    double cartan = 0.0;
    for (int j = 0; j < alg.rank; ++j)
      cartan += 0.5 * blk.t.row(j) * pprime * blk.t.row(j).transpose();
    CHECK(direct == doctest::Approx(cartan - 0.5 * root_sum.real()).epsilon(1e-10));
  }
  SUBCASE("gauge invariance under the residual torus") {
    ProductSpace sp = make_space(Family::A, 2, random_coupling(3, rng));
    for (int it = 0; it < 20; ++it) {
      ReducedPoint pt = random_reduced_point(sp, rng);
      double h = hamiltonian_closed_form(sp, pt);
      VectorXd t = sp.fixed_cartan() *
                   gaussian_vector(rng, static_cast<int>(sp.fixed_cartan().cols()));
      ReducedPoint moved{pt.q, pt.p, sp.residual_gauge(t, pt.xi)};
      CHECK(hamiltonian_closed_form(sp, moved) == doctest::Approx(h).epsilon(1e-10));
    }
  }
}

TEST_CASE("q-gradient matches central differences") {
  Rng rng(9);
  for (auto [f, r, n] : {std::tuple{Family::A, 1, 2}, {Family::A, 2, 2}}) {
    ProductSpace sp = make_space(f, r, random_coupling(n, rng));
    for (int it = 0; it < 10; ++it) {
      ReducedPoint pt = random_reduced_point(sp, rng, 1.0, 0.4);
      VectorXd grad = hamiltonian_q_gradient(sp, pt);
      const double h = 1e-6;
      for (int j = 0; j < sp.algebra().rank; ++j) {
        ReducedPoint up = pt, dn = pt;
        up.q[j] += h;
        dn.q[j] -= h;
        double fd = (hamiltonian_closed_form(sp, up) - hamiltonian_closed_form(sp, dn)) /
                    (2 * h);
        CHECK(std::abs(grad[j] - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("reduced flow") {
  Rng rng(10);
  SUBCASE("xi = 0: straight line in q, constant p") {
    ProductSpace sp = make_space(Family::A, 2, equal_coupling(2));
    ReducedPoint pt = random_reduced_point(sp, rng, 1.0, 0.6);
    pt.xi.setZero();
    pt.p *= 0.1;  // stay in the alcove over [0,1]
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    Trajectory traj = integrate_reduced(sp, pt, grid);
    REQUIRE(traj.status == "ok");
    REQUIRE(traj.samples.size() == grid.size());
    for (const auto& s : traj.samples) {
      CHECK((s.point.q - (pt.q + s.t * pt.p)).norm() < 1e-10);
      CHECK((s.point.p - pt.p).norm() < 1e-12);
    }
  }
  SUBCASE("energy conservation and orbit invariants, su(2) N=2") {
    ProductSpace sp = make_space(Family::A, 1, equal_coupling(2));
    ReducedPoint pt = random_reduced_point(sp, rng, 0.6, 0.8);
    pt.p *= 0.3;
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    Trajectory traj = integrate_reduced(sp, pt, grid);
    REQUIRE(traj.status == "ok");
    CHECK(traj.max_energy_drift < 1e-8);
    const SimpleLieAlgebra& alg = sp.algebra();
    for (int k = 0; k < sp.n(); ++k) {
      VectorXd inv0 = orbit_invariants(alg, sp.component(traj.samples.front().point.xi, k));
      VectorXd inv1 = orbit_invariants(alg, sp.component(traj.samples.back().point.xi, k));
      CHECK((inv0 - inv1).norm() < 1e-8);
    }
  }
  SUBCASE("wall approach truncates with status") {
    ProductSpace sp = make_space(Family::A, 1, equal_coupling(2));
    ReducedPoint pt;
    const SimpleLieAlgebra& alg = sp.algebra();
    pt.q = AlgebraVector::Zero(alg.dim);
    pt.q[0] = 0.05 / alg.root_angle(0, 0);  // just inside the lower wall
    pt.p = AlgebraVector::Zero(alg.dim);
    pt.p[0] = -1.0;  // heading straight at it
    pt.xi = ProductVector::Zero(sp.pdim());
    std::vector<double> grid{0.0, 0.5, 1.0};
    Trajectory traj = integrate_reduced(sp, pt, grid);
    CHECK(traj.status == "truncated");
    CHECK(traj.truncated_at < 0.5);
  }
}
