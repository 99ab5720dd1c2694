#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "twistred/sun_realization.hpp"
#include <doctest.h>

#include <Eigen/Dense>

#include "twistred/spectrum.hpp"

using namespace twistred;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

Weight w1(int a) {
  Weight w(1);
  w << a;
  return w;
}

Weight w2(int a, int b) {
  Weight w(2);
  w << a, b;
  return w;
}

// su(2) brute-force singlet count: zero-weight states minus weight-2 states
// of the triple tensor product.
long su2_singlet_oracle(int a, int b, int c) {
  auto count = [&](int target) {
    long n = 0;
    for (int i = -a; i <= a; i += 2)
      for (int j = -b; j <= b; j += 2)
        for (int k = -c; k <= c; k += 2)
          if (i + j + k == target) ++n;
    return n;
  };
  return count(0) - count(2);
}

}  // namespace

TEST_CASE("dimensions and weight systems") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  CHECK(su2.dimension(w1(0)) == 1);
  CHECK(su2.dimension(w1(7)) == 8);

  WeightToolkit su3(build_root_system(Family::A, 2));
  CHECK(su3.dimension(w2(1, 0)) == 3);
  CHECK(su3.dimension(w2(1, 1)) == 8);
  CHECK(su3.dimension(w2(3, 0)) == 10);
  CHECK(su3.dimension(w2(2, 2)) == 27);

  SUBCASE("weight multiplicities sum to the dimension") {
    for (Weight lam : {w2(1, 1), w2(2, 1), w2(3, 3)}) {
      long total = 0;
      for (const auto& wm : su3.weight_system(lam)) total += wm.multiplicity;
      CHECK(total == su3.dimension(lam));
    }
    // adjoint of su(3): zero weight has multiplicity 2
    for (const auto& wm : su3.weight_system(w2(1, 1)))
      if (wm.weight == w2(0, 0)) CHECK(wm.multiplicity == 2);
  }
  SUBCASE("G2 toolkit works through the same path") {
    WeightToolkit g2(build_root_system(Family::G2, 2));
    CHECK(g2.dimension(w2(0, 1)) == 7);   // short-node fundamental
    CHECK(g2.dimension(w2(1, 0)) == 14);  // adjoint
  }
}

TEST_CASE("contragredients") {
  WeightToolkit su3(build_root_system(Family::A, 2));
  CHECK(su3.contragredient(w2(1, 0)) == w2(0, 1));
  CHECK(su3.contragredient(w2(2, 1)) == w2(1, 2));
  WeightToolkit su2(build_root_system(Family::A, 1));
  CHECK(su2.contragredient(w1(5)) == w1(5));
}

TEST_CASE("su(2) singlet rule against brute-force weight counting") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; b <= 20; ++b) {
      for (int c = 0; c <= 20; ++c) {
        long tri = su2_triangle_singlet(a, b, c);
        CHECK(tri == su2_singlet_oracle(a, b, c));
        if ((a + b + c) % 4 == 0 && a <= 8 && b <= 8 && c <= 8) {
          // the generic Klimyk path agrees where we spot-check it
          CHECK(tri == su2.singlet_dimension(w1(a), w1(b), w1(c)));
        }
      }
    }
  }
  CHECK(su2_triangle_singlet(1, 1, 2) == 1);
  CHECK(su2_triangle_singlet(1, 1, 1) == 0);
  // nu = 0 reduces to the contragredient pairing
  CHECK(su2.singlet_dimension(w1(3), w1(3), w1(0)) == 1);
  CHECK(su2.singlet_dimension(w1(3), w1(4), w1(0)) == 0);
}

TEST_CASE("su(3) singlets by Klimyk convolution") {
  WeightToolkit su3(build_root_system(Family::A, 2));
  // classic decompositions: 3 x 3bar = 8 + 1, 8 x 8 = ... with two singlet
  // pairings of the adjoint squared? no: (8 x 8)^G = 1
  CHECK(su3.singlet_dimension(w2(1, 0), w2(0, 1), w2(0, 0)) == 1);
  CHECK(su3.singlet_dimension(w2(1, 0), w2(1, 0), w2(1, 0)) == 1);  // 3^3 epsilon
  CHECK(su3.singlet_dimension(w2(1, 1), w2(1, 1), w2(0, 0)) == 1);
  CHECK(su3.singlet_dimension(w2(1, 1), w2(1, 1), w2(1, 1)) == 2);  // f and d
  CHECK(su3.singlet_dimension(w2(1, 0), w2(1, 0), w2(0, 0)) == 0);
  // tensor multiplicities: 3 x 3 = 6 + 3bar
  CHECK(su3.tensor_multiplicity(w2(1, 0), w2(1, 0), w2(2, 0)) == 1);
  CHECK(su3.tensor_multiplicity(w2(1, 0), w2(1, 0), w2(0, 1)) == 1);
  CHECK(su3.tensor_multiplicity(w2(1, 0), w2(1, 0), w2(1, 1)) == 0);
  // 8 x 8 contains 8 twice
  CHECK(su3.tensor_multiplicity(w2(1, 1), w2(1, 1), w2(1, 1)) == 2);
}

TEST_CASE("Casimir values") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  SUBCASE("su(2) closed form -m(m+2)/2 at lambda = 1") {
    VectorXd lam = VectorXd::Ones(1);
    for (int m = 0; m <= 20; ++m) {
      double got = casimir_value(su2, {w1(m)}, lam);
      CHECK(got == doctest::Approx(-m * (m + 2) / 2.0).epsilon(1e-13));
    }
  }
  SUBCASE("brute-force representation Casimir, labels <= 20") {
    for (int m = 0; m <= 20; ++m) {
      auto rep = su2_rep_matrices(m);
      MatrixXcd omega = MatrixXcd::Zero(m + 1, m + 1);
      for (const auto& r : rep) omega -= r * r;
      double want = su2.casimir_pairing(w1(m));
      CHECK((omega - want * MatrixXcd::Identity(m + 1, m + 1)).norm() < 1e-12 * (m + 1));
    }
  }
  SUBCASE("su(3) brute force in the defining representation") {
    WeightToolkit su3(build_root_system(Family::A, 2));
    const SunRealization& real = sun_realization_cache(3);
    const SimpleLieAlgebra& alg = real.algebra();
    MatrixXcd omega = MatrixXcd::Zero(3, 3);
    for (int i = 0; i < alg.dim; ++i)
      omega -= real.basis()[i] * real.basis()[i];
    double want = su3.casimir_pairing(w2(1, 0));
    CHECK((omega - want * MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  }
  SUBCASE("monotone in each label") {
    VectorXd lam = VectorXd::Ones(1);
    for (int m = 0; m < 10; ++m)
      CHECK(casimir_value(su2, {w1(m + 1)}, lam) < casimir_value(su2, {w1(m)}, lam));
  }
}

TEST_CASE("Weyl constant") {
  CHECK(weyl_constant(build_root_system(Family::A, 1)) ==
        doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(weyl_constant(build_root_system(Family::A, 2)) ==
        doctest::Approx(-1.0).epsilon(1e-13));
  // independence of couplings is structural: the function takes none
}

TEST_CASE("level enumeration") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  std::vector<int> id_perm{0};

  SUBCASE("N=1, trivial orbit: all dominant weights, energies m(m+2)/4") {
    VectorXd lam = VectorXd::Ones(1);
    auto levels = enumerate_levels(su2, id_perm, lam, {w1(0)}, 10.0);
    REQUIRE(levels.size() >= 5);
    for (std::size_t i = 0; i < 5; ++i) {
      int m = static_cast<int>(i);
      CHECK(levels[i].weights[0] == w1(m));
      CHECK(levels[i].energy == doctest::Approx(m * (m + 2) / 4.0).epsilon(1e-12));
      CHECK(levels[i].multiplicity == 1);
    }
  }
  SUBCASE("N=2 equal couplings, trivial orbits: paired weights") {
    VectorXd lam = VectorXd::Constant(2, 2.0);
    auto levels = enumerate_levels(su2, id_perm, lam, {w1(0), w1(0)}, 8.0);
    for (const auto& lv : levels) {
      CHECK(lv.weights[0] == lv.weights[1]);  // contragredient chain forces it
      int m = lv.weights[0][0];
      CHECK(lv.energy == doctest::Approx(m * (m + 2) / 4.0).epsilon(1e-12));
    }
    CHECK(levels.size() >= 4);
  }
  SUBCASE("nontrivial orbits raise the ground level") {
    VectorXd lam = VectorXd::Constant(2, 2.0);
    auto levels = enumerate_levels(su2, id_perm, lam, {w1(2), w1(2)}, 6.0);
    REQUIRE(!levels.empty());
    // the trivial tuple carries no singlet against spin-1 orbits; the ground
    // level is (1,1) at m(m+2)/4 = 3/4
    CHECK(levels.front().energy == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(levels.front().weights[0] == w1(1));
    bool found_mixed = false;
    for (const auto& lv : levels)
      if (lv.weights[0] != lv.weights[1]) found_mixed = true;
    CHECK(found_mixed);
  }
  SUBCASE("empty output below the minimum level") {
    VectorXd lam = VectorXd::Ones(1);
    auto levels = enumerate_levels(su2, id_perm, lam, {w1(2)}, -1.0);
    CHECK(levels.empty());
  }
  SUBCASE("su(3) with the diagram flip in the closing factor") {
    WeightToolkit su3(build_root_system(Family::A, 2));
    std::vector<int> flip{1, 0};
    VectorXd lam = VectorXd::Ones(1);
    auto levels = enumerate_levels(su3, flip, lam, {w2(0, 0)}, 4.0);
    // closing factor demands a singlet in V_{(L* o flip)} x V_L;
    // L* o flip = L* with swapped labels = L swapped twice = ... check
    // against a direct scan
    for (const auto& lv : levels) {
      Weight l = lv.weights[0];
      Weight closing = su3.compose_with_symmetry(su3.contragredient(l), flip);
      CHECK(su3.tensor_multiplicity(closing, l, w2(0, 0)) ==
            lv.multiplicity);
    }
    REQUIRE(!levels.empty());
  }
}

TEST_CASE("cutoff guards") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  CHECK_THROWS_AS(su2.weight_system(Weight::Constant(1, 1000)), ValidationError);
  std::vector<int> id_perm{0};
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(
      enumerate_levels(su2, id_perm, lam, {Weight::Zero(1)}, 1e9),
      ValidationError);
}

TEST_CASE("cyclic relabeling keeps the level table") {
  WeightToolkit su2(build_root_system(Family::A, 1));
  std::vector<int> id_perm{0};
  VectorXd lam(3);
  lam << 3, 3, 3;
  std::vector<Weight> nu{w1(1), w1(2), w1(1)};
  auto lv1 = enumerate_levels(su2, id_perm, lam, nu, 5.0);
  // cyclic shift of the data
  std::vector<Weight> nu2{w1(2), w1(1), w1(1)};
  auto lv2 = enumerate_levels(su2, id_perm, lam, nu2, 5.0);
  REQUIRE(lv1.size() == lv2.size());
  for (std::size_t i = 0; i < lv1.size(); ++i) {
    CHECK(lv1[i].energy == doctest::Approx(lv2[i].energy).epsilon(1e-12));
    CHECK(lv1[i].multiplicity == lv2[i].multiplicity);
  }
}

TEST_CASE("spin potential matrix") {
  Rng rng(77);
  const SimpleLieAlgebra& alg = algebra_cache(Family::A, 1);
  DiagramAutomorphism id = identity_automorphism(alg);

  SUBCASE("trivial orbits give the empty matrix... restated: 1-dim zero") {
    VectorXd lam = VectorXd::Ones(1);
    ProductSpace sp(alg, id, CouplingVector(lam));
    AlgebraVector q = random_alcove_point(alg, id, rng, 0.1);
    MatrixXcd pot = spin_potential_matrix(sp, q, {0});
    REQUIRE(pot.rows() == 1);
    CHECK(std::abs(pot(0, 0)) < 1e-12);
  }
  SUBCASE("N=1 spin-1: scalar 1/(2 sin^2(theta/2))") {
    VectorXd lam = VectorXd::Ones(1);
    ProductSpace sp(alg, id, CouplingVector(lam));
    for (int it = 0; it < 10; ++it) {
      AlgebraVector q = random_alcove_point(alg, id, rng, 0.05);
      double theta = alg.theta(0, q);
      MatrixXcd pot = spin_potential_matrix(sp, q, {2});
      REQUIRE(pot.rows() == 1);
      double want = 0.5 / std::pow(std::sin(theta / 2.0), 2);
      CHECK(pot(0, 0).real() == doctest::Approx(want).epsilon(1e-10));
      CHECK(std::abs(pot(0, 0).imag()) < 1e-12);
    }
  }
  SUBCASE("odd total spin: the invariant subspace is empty") {
    VectorXd lam = VectorXd::Ones(1);
    ProductSpace sp(alg, id, CouplingVector(lam));
    AlgebraVector q = random_alcove_point(alg, id, rng, 0.1);
    MatrixXcd pot = spin_potential_matrix(sp, q, {1});
    CHECK(pot.rows() == 0);
  }
  SUBCASE("Hermitian and positive semidefinite on the alcove") {
    VectorXd lam = VectorXd::Constant(2, 2.0);
    ProductSpace sp(alg, id, CouplingVector(lam));
    for (int it = 0; it < 10; ++it) {
      AlgebraVector q = random_alcove_point(alg, id, rng, 0.05);
      MatrixXcd pot = spin_potential_matrix(sp, q, {1, 1});
      REQUIRE(pot.rows() == 2);  // two zero-weight states in V_1 x V_1
      CHECK((pot - pot.adjoint()).norm() < 1e-10);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(pot);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}
