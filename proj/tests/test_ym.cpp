#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "twistred/ym.hpp"

using namespace twistred;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

Eigen::VectorXd random_marks(int n, Rng& rng) {
  VectorXd raw(n + 1);
  for (int i = 0; i <= n; ++i) raw[i] = uniform(rng, 0.2, 1.0);
  double total = raw.sum();
  VectorXd marks(n);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += raw[k] / total;
    marks[k] = acc;
  }
  return marks;
}

struct SliceSetup {
  Eigen::VectorXd marks;
  std::vector<AlgebraVector> charges;
  AlgebraVector chi, p;
};

SliceSetup random_setup(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut,
                        int n, Rng& rng, double scale = 0.8) {
  SliceSetup s;
  s.marks = random_marks(n, rng);
  CouplingVector lam = coupling_from_marks(s.marks);
  ProductSpace space(alg, aut, lam);
  ProductVector xi = random_orbit_spin(space, rng, scale);
  s.charges.resize(n);
  for (int k = 0; k < n; ++k)
    s.charges[k] = lam.lambdas[k] * space.component(xi, k);
  s.chi = random_alcove_point(alg, aut, rng, 0.1);
  s.p = space.fixed_cartan() * gaussian_vector(rng, static_cast<int>(space.fixed_cartan().cols()));
  return s;
}

// smooth periodic su(n) connection from a few Fourier modes
ConnectionSample smooth_connection(const SunRealization& real, Rng& rng,
                                   double scale = 0.6) {
  const SimpleLieAlgebra& alg = real.algebra();
  std::vector<MatrixXcd> coef;
  for (int m = 0; m < 5; ++m)
    coef.push_back(real.to_matrix(gaussian_vector(rng, alg.dim, scale)));
  ConnectionSample a;
  a.n = real.n();
  a.base = [coef](double x) {
    MatrixXcd v = coef[0];
    v += std::sin(2 * M_PI * x) * coef[1] + std::cos(2 * M_PI * x) * coef[2];
    v += std::sin(4 * M_PI * x) * coef[3] + std::cos(4 * M_PI * x) * coef[4];
    return v;
  };
  return a;
}

}  // namespace

TEST_CASE("coupling from marks") {
  Rng rng(61);
  for (int n : {1, 2, 3, 5}) {
    VectorXd marks = random_marks(n, rng);
    CouplingVector lam = coupling_from_marks(marks);
    CHECK(lam.lambdas.cwiseInverse().sum() == doctest::Approx(1.0).epsilon(1e-13));
  }
  VectorXd bad(2);
  bad << 0.7, 0.4;
  CHECK_THROWS_AS(coupling_from_marks(bad), ValidationError);
}

TEST_CASE("slice solve and jump conditions") {
  Rng rng(62);
  const SimpleLieAlgebra& alg = algebra_cache(Family::A, 1);
  DiagramAutomorphism id = identity_automorphism(alg);

  SUBCASE("zero charges: constant field, zero jumps, exact energy") {
    SliceSetup s = random_setup(alg, id, 3, rng);
    for (auto& z : s.charges) z.setZero();
    FieldConfig cfg = solve_slice(alg, id, s.marks, s.charges, s.chi, s.p);
    CHECK(jump_residual(cfg) < 1e-12);
    for (int k = 0; k < cfg.n(); ++k)
      CHECK((cfg.plus_limits[k] - s.p).norm() < 1e-11);
    CHECK(field_energy(cfg) == doctest::Approx(s.p.dot(s.p)).epsilon(1e-13));
    CHECK(theta_pairing_check(cfg) < 1e-12);
  }

  SUBCASE("random su(2), N=3: jump and componentwise residuals") {
    for (int it = 0; it < 20; ++it) {
      SliceSetup s = random_setup(alg, id, 3, rng);
      FieldConfig cfg = solve_slice(alg, id, s.marks, s.charges, s.chi, s.p);
      CHECK(jump_residual(cfg) < 1e-10);
      CHECK(correspondence_residual(cfg) < 1e-10);
      CHECK(theta_pairing_check(cfg) < 1e-10);
    }
  }

  SUBCASE("twisted case at the algebra level") {
    const SimpleLieAlgebra& a2 = algebra_cache(Family::A, 2);
    DiagramAutomorphism flip = diagram_automorphism(a2, 2);
    for (int it = 0; it < 10; ++it) {
      SliceSetup s = random_setup(a2, flip, 2, rng);
      FieldConfig cfg = solve_slice(a2, flip, s.marks, s.charges, s.chi, s.p);
      CHECK(jump_residual(cfg) < 1e-10);
      CHECK(correspondence_residual(cfg) < 1e-10);
      CHECK(theta_pairing_check(cfg) < 1e-10);
      // quasi-periodicity of the field evaluator
      double x = uniform(rng, -0.3, 1.3);
      AlgebraVector lhs = cfg.field_at(x + 1.0);
      AlgebraVector rhs = cfg.tau_apply(cfg.field_at(x));
      CHECK((lhs - rhs).norm() < 1e-11);
    }
  }

  SUBCASE("infeasible charges are rejected") {
    SliceSetup s = random_setup(alg, id, 2, rng);
    s.charges[0] += alg.basis_vector(0);  // inject a net Cartan charge
    CHECK_THROWS_AS(solve_slice(alg, id, s.marks, s.charges, s.chi, s.p),
                    ValidationError);
  }
}

TEST_CASE("field energy equals the weighted momentum norm") {
  Rng rng(63);
  const SimpleLieAlgebra& alg = algebra_cache(Family::A, 2);
  DiagramAutomorphism id = identity_automorphism(alg);
  for (int it = 0; it < 10; ++it) {
    SliceSetup s = random_setup(alg, id, 3, rng);
    FieldConfig cfg = solve_slice(alg, id, s.marks, s.charges, s.chi, s.p);
    SliceData sd = slice_to_reduced(cfg);
    ProductSpace space(alg, id, sd.coupling);
    double wnorm = space.inner(sd.j, sd.j);
    CHECK(field_energy(cfg) == doctest::Approx(wnorm).epsilon(1e-12));

    // quadrature oracle: 1000 midpoint samples per interval
    double quad = 0.0;
    for (int k = 1; k <= cfg.n(); ++k) {
      double x0 = cfg.mark(k - 1), x1 = cfg.mark(k);
      double h = (x1 - x0) / 1000;
      for (int i = 0; i < 1000; ++i) {
        AlgebraVector e = cfg.field_at(x0 + (i + 0.5) * h);
        quad += h * e.dot(e);
      }
    }
    CHECK(quad == doctest::Approx(field_energy(cfg)).epsilon(1e-10));
  }
}

TEST_CASE("round trip between slice data and field configurations") {
  Rng rng(64);
  const SimpleLieAlgebra& alg = algebra_cache(Family::A, 2);
  DiagramAutomorphism id = identity_automorphism(alg);
  for (int it = 0; it < 10; ++it) {
    SliceSetup s = random_setup(alg, id, 3, rng);
    FieldConfig cfg = solve_slice(alg, id, s.marks, s.charges, s.chi, s.p);
    SliceData sd = slice_to_reduced(cfg);
    // rebuild the configuration from the reduced data
    std::vector<AlgebraVector> charges(cfg.n());
    for (int k = 0; k < cfg.n(); ++k)
      charges[k] = sd.coupling.lambdas[k] *
                   AlgebraVector(sd.point.xi.segment(k * alg.dim, alg.dim));
    FieldConfig back =
        solve_slice(alg, id, cfg.marks, charges, sd.point.q, sd.point.p);
    CHECK((back.marks - cfg.marks).norm() < 1e-14);
    CHECK((back.chi - cfg.chi).norm() < 1e-14);
    for (int k = 0; k < cfg.n(); ++k) {
      CHECK((back.charges[k] - cfg.charges[k]).norm() < 1e-12);
      CHECK((back.plus_limits[k] - cfg.plus_limits[k]).norm() < 1e-11);
    }
  }
}

TEST_CASE("rescaled marks preserve the pairing identity") {
  Rng rng(65);
  const SimpleLieAlgebra& alg = algebra_cache(Family::A, 1);
  DiagramAutomorphism id = identity_automorphism(alg);
  SliceSetup s = random_setup(alg, id, 3, rng);
  FieldConfig cfg = solve_slice(alg, id, s.marks, s.charges, s.chi, s.p);
  CHECK(theta_pairing_check(cfg) < 1e-10);
  // squeeze the marks toward the origin: different couplings, same identity
  VectorXd marks2 = 0.6 * s.marks;
  CouplingVector lam2 = coupling_from_marks(marks2);
  ProductSpace space2(alg, id, lam2);
  ProductVector xi2 = random_orbit_spin(space2, rng, 0.8);
  std::vector<AlgebraVector> charges2(3);
  for (int k = 0; k < 3; ++k)
    charges2[k] = lam2.lambdas[k] * space2.component(xi2, k);
  FieldConfig cfg2 = solve_slice(alg, id, marks2, charges2, s.chi, s.p);
  CHECK(theta_pairing_check(cfg2) < 1e-10);
  CHECK(jump_residual(cfg2) < 1e-10);
}

TEST_CASE("wilson line") {
  Rng rng(66);
  const SunRealization& real = sun_realization_cache(2);
  const SimpleLieAlgebra& alg = real.algebra();

  SUBCASE("zero connection gives the identity") {
    ConnectionSample a;
    a.n = 2;
    a.base = [](double) { return MatrixXcd::Zero(2, 2); };
    CHECK((wilson_line(a, 1.7) - MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("constant connection integrates to the exponential") {
    MatrixXcd x = real.to_matrix(gaussian_vector(rng, alg.dim));
    ConnectionSample a;
    a.n = 2;
    a.base = [x](double) { return x; };
    for (double t : {0.3, 1.0, 2.2})
      CHECK((wilson_line(a, t) - sun_exp(t * x)).norm() < 1e-12);
  }
  SUBCASE("piecewise constant: ordered product of interval exponentials") {
    std::vector<double> cuts{0.0, 0.35, 0.8};
    std::vector<MatrixXcd> vals;
    for (int i = 0; i < 3; ++i)
      vals.push_back(real.to_matrix(gaussian_vector(rng, alg.dim)));
    ConnectionSample a;
    a.n = 2;
    a.breaks = cuts;
    a.base = [cuts, vals](double x) {
      int k = 0;
      while (k + 1 < 3 && cuts[k + 1] <= x) ++k;
      return vals[k];
    };
    MatrixXcd want = sun_exp(0.35 * vals[0]) * sun_exp(0.45 * vals[1]) *
                     sun_exp(0.2 * vals[2]);
    CHECK((wilson_line(a, 1.0) - want).norm() < 1e-10);
  }
  SUBCASE("quasi-monodromy relation, identity and conjugate twists") {
    for (GroupTwistYM tw : {GroupTwistYM::Identity, GroupTwistYM::EntrywiseConjugate}) {
      ConnectionSample a = smooth_connection(real, rng);
      a.twist = tw;
      for (double x : {0.2, 0.6, 1.4}) {
        std::vector<double> xs{x, 1.0, x + 1.0};
        std::sort(xs.begin(), xs.end());
        auto vals = wilson_line_path(a, xs);
        auto value_at = [&](double t) {
          for (std::size_t i = 0; i < xs.size(); ++i)
            if (xs[i] == t) return vals[i];
          return MatrixXcd();
        };
        MatrixXcd yx = value_at(x);
        MatrixXcd rhs = value_at(1.0) *
                        (tw == GroupTwistYM::EntrywiseConjugate ? yx.conjugate() : yx);
        CHECK((value_at(x + 1.0) - rhs).norm() < 1e-9);
      }
    }
  }
  SUBCASE("unitarity is preserved") {
    ConnectionSample a = smooth_connection(real, rng, 1.2);
    CHECK(unitarity_defect(wilson_line(a, 3.0)) < 1e-9);
  }
  SUBCASE("fourth-order convergence") {
    ConnectionSample a = smooth_connection(real, rng);
    WilsonOptions fine;
    fine.steps_per_unit = 2000;
    MatrixXcd ref = wilson_line(a, 1.0, fine);
    WilsonOptions c1, c2;
    c1.steps_per_unit = 40;
    c2.steps_per_unit = 80;
    double e1 = (wilson_line(a, 1.0, c1) - ref).norm();
    double e2 = (wilson_line(a, 1.0, c2) - ref).norm();
    CHECK(e1 / e2 > 10.0);  // ~16 for order 4
  }
}

TEST_CASE("gauge fixing to a constant connection") {
  Rng rng(67);
  const SunRealization& real = sun_realization_cache(2);
  const SimpleLieAlgebra& alg = real.algebra();
  DiagramAutomorphism id = identity_automorphism(alg);

  SUBCASE("already constant in the alcove: trivial gauge") {
    AlgebraVector chi = random_alcove_point(alg, id, rng, 0.1);
    MatrixXcd chi_mat = real.to_matrix(chi);
    ConnectionSample a;
    a.n = 2;
    a.base = [chi_mat](double) { return chi_mat; };
    ConstantGauge g = gauge_to_constant(real, a);
    CHECK((g.chi - chi).norm() < 1e-9);
    MatrixXcd g0 = g.at(0.0);
    for (double x : {0.3, 0.7}) CHECK((g.at(x) - g0).norm() < 1e-9);
    // the constant gauge transform of A is chi itself
    MatrixXcd a_g = g0 * chi_mat * g0.adjoint();
    CHECK((a_g - chi_mat).norm() < 1e-9);
  }

  SUBCASE("random smooth connections: gauge identity via finite differences") {
    for (int it = 0; it < 5; ++it) {
      ConnectionSample a = smooth_connection(real, rng);
      ConstantGauge g = gauge_to_constant(real, a);
      MatrixXcd chi_mat = g.chi_mat;
      const double h = 1e-3;
      for (double x : {0.15, 0.45, 0.85}) {
        // one coherent sweep + five-point stencil
        std::vector<double> xs{x - 2 * h, x - h, x, x + h, x + 2 * h};
        auto gs = g.path(xs);
        MatrixXcd gdot =
            (-gs[4] + 8.0 * gs[3] - 8.0 * gs[1] + gs[0]) / (12.0 * h);
        MatrixXcd gi = gs[2].inverse();
        MatrixXcd resid = gs[2] * a.at(x) * gi - gdot * gi - chi_mat;
        CHECK(resid.norm() < 1e-8);
      }
      // quasi-periodicity (here: plain periodicity)
      for (double x : {0.2, 0.6}) {
        auto gs = g.path({x, x + 1.0});
        CHECK((gs[1] - gs[0]).norm() < 1e-9);
      }
    }
  }

  SUBCASE("alcove constant is invariant under periodic gauge dressings") {
    for (int it = 0; it < 5; ++it) {
      ConnectionSample a = smooth_connection(real, rng);
      ConstantGauge g0 = gauge_to_constant(real, a);
      // periodic dressing from two generators with analytic derivative
      MatrixXcd x1 = real.to_matrix(gaussian_vector(rng, alg.dim, 0.5));
      MatrixXcd x2 = real.to_matrix(gaussian_vector(rng, alg.dim, 0.5));
      auto th1 = [](double x) { return std::sin(2 * M_PI * x); };
      auto th2 = [](double x) { return std::cos(2 * M_PI * x) - 1.0; };
      auto dth1 = [](double x) { return 2 * M_PI * std::cos(2 * M_PI * x); };
      auto dth2 = [](double x) { return -2 * M_PI * std::sin(2 * M_PI * x); };
      auto gfun = [=](double x) {
        return Eigen::MatrixXcd(sun_exp(th1(x) * x1) * sun_exp(th2(x) * x2));
      };
      auto gdot = [=](double x) {
        return Eigen::MatrixXcd(dth1(x) * x1 * sun_exp(th1(x) * x1) * sun_exp(th2(x) * x2) +
                                sun_exp(th1(x) * x1) * dth2(x) * x2 * sun_exp(th2(x) * x2));
      };
      ConnectionSample dressed = gauge_transform(a, gfun, gdot);
      ConstantGauge g1 = gauge_to_constant(real, dressed);
      CHECK((g1.chi - g0.chi).norm() < 1e-9);
    }
  }
}
