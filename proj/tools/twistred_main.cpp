#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "twistred/json_io.hpp"
#include "twistred/projection_dynamics.hpp"
#include "twistred/spectrum.hpp"
#include "twistred/sutherland.hpp"
#include "twistred/ym.hpp"

namespace fs = std::filesystem;
using namespace twistred;

namespace {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

Json results_to_json(const std::vector<CheckResult>& results) {
  Json arr = Json::array();
  for (const auto& r : results)
    arr.push_back(Json{{"check", r.name},
                       {"max_residual", r.residual},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
  return arr;
}

bool print_results(const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %-38s residual %.3e (tol %.1e)\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.residual, r.tolerance);
    all = all && r.pass;
  }
  return all;
}

CheckResult make_check(const std::string& name, double residual, double tol) {
  return {name, residual, tol, residual < tol};
}

// Bounded parallel sweep; items only reduce into their own slot.
template <typename F>
std::vector<double> parallel_sweep(int items, int workers, F&& body) {
  std::vector<double> out(items, 0.0);
  if (workers <= 1) {
    for (int i = 0; i < items; ++i) out[i] = body(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int nw = std::min(workers, items);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < items; i = next.fetch_add(1))
        out[i] = body(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

ProductSpace space_from_config(const RunConfig& cfg) {
  const SimpleLieAlgebra& alg = algebra_cache(cfg.family, cfg.rank);
  DiagramAutomorphism aut = diagram_automorphism(alg, cfg.gamma_order);
  return ProductSpace(alg, aut, cfg.coupling());
}

std::vector<double> time_grid(const RunConfig& cfg) {
  std::vector<double> grid;
  int n = std::max(2, cfg.samples);
  for (int i = 0; i < n; ++i)
    grid.push_back(cfg.t0 + (cfg.t1 - cfg.t0) * i / (n - 1));
  return grid;
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_lemma1(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  int nmat = std::max(2, std::min(4, cfg.rank + 1));
  ProjectionSystem sys(sun_realization_cache(nmat), cfg.coupling());
  double worst_fwd = 0.0, worst_bwd = 0.0;
  for (int it = 0; it < 20; ++it) {
    MatrixList g = sys.random_group_tuple(rng);
    MatrixList eta = sys.random_group_tuple(rng);
    MatrixList gp = sys.twisted_conjugate(eta, g);
    MatrixList chain = sys.reconstruct_gauge(g, gp, eta[sys.n() - 1]);
    for (int k = 0; k < sys.n(); ++k)
      worst_fwd = std::max(worst_fwd, (chain[k] - eta[k]).norm());

    Eigen::MatrixXcd eta_n = random_special_unitary(nmat, rng);
    MatrixList gp2 = sys.random_group_tuple(rng);
    Eigen::MatrixXcd target = eta_n * sys.monodromy(g) * eta_n.adjoint();
    Eigen::MatrixXcd head = Eigen::MatrixXcd::Identity(nmat, nmat);
    for (int k = 0; k + 1 < sys.n(); ++k) head = head * gp2[k];
    gp2[sys.n() - 1] = head.inverse() * target;
    MatrixList sol = sys.reconstruct_gauge(g, gp2, eta_n);
    MatrixList back = sys.twisted_conjugate(sol, g);
    for (int k = 0; k < sys.n(); ++k)
      worst_bwd = std::max(worst_bwd, (back[k] - gp2[k]).norm());
  }
  return {make_check("lemma1.gauge_chain", worst_fwd, 1e-10),
          make_check("lemma1.converse_orbit", worst_bwd, 1e-9)};
}

std::vector<CheckResult> suite_lemma2(const RunConfig& cfg) {
  ProductSpace sp = space_from_config(cfg);
  Rng rng(cfg.seed);
  int tdim = static_cast<int>(sp.fixed_cartan().cols());
  Eigen::VectorXd w = sp.metric_diagonal().cwiseSqrt();
  double worst_ker = 0.0, worst_img = 0.0, worst_rank = 1.0;
  int samples = 50;
  for (int it = 0; it < samples; ++it) {
    Eigen::VectorXd q = random_alcove_point(sp.algebra(), sp.automorphism(), rng, 0.05);
    Eigen::MatrixXd full = sp.constraint_matrix_full(q);
    Eigen::MatrixXd scaled = w.asDiagonal() * full * w.cwiseInverse().asDiagonal();
    Eigen::MatrixXd ker = kernel_basis(scaled, 1e-8);
    if (ker.cols() != tdim) {
      worst_rank = 0.0;
      continue;
    }
    worst_ker = std::max(worst_ker,
                         subspace_angle(ker, w.asDiagonal() * sp.Q_basis()));
    Eigen::MatrixXd img = orthonormal_span(scaled, 1e-8);
    worst_img = std::max(worst_img,
                         subspace_angle(img, w.asDiagonal() * sp.K_perp_basis()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sp.constraint_operator(q));
    if (svd.singularValues().minCoeff() < 1e-8) worst_rank = 0.0;
  }
  return {make_check("lemma2.kernel_equals_Q", worst_ker, 1e-8),
          make_check("lemma2.image_equals_Kperp", worst_img, 1e-8),
          make_check("lemma2.bijective", 1.0 - worst_rank, 0.5)};
}

std::vector<CheckResult> suite_inverse(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  double worst = 0.0, worst0 = 0.0;
  for (int it = 0; it < 500; ++it) {
    int n = 1 + static_cast<int>(uniform(rng, 0.0, 8.0));
    n = std::min(n, 8);
    Eigen::VectorXd wts(n);
    for (int i = 0; i < n; ++i) wts[i] = uniform(rng, 0.5, 2.5);
    CouplingVector lam = coupling_from_weights(wts);
    double x = uniform(rng, 0.05, 2 * M_PI - 0.05);
    Eigen::MatrixXcd mp = hopping_matrix(x, lam) * hopping_inverse(x, lam);
    worst = std::max(
        worst, (mp - Eigen::MatrixXcd::Identity(n, n)).norm());
    // degenerate block
    Eigen::VectorXd linv = lam.lambdas.cwiseInverse();
    Eigen::MatrixXcd lm0 = linv.asDiagonal() * hopping_matrix(0.0, lam);
    Eigen::MatrixXcd pi = zero_mode_projector(lam);
    Eigen::MatrixXcd comp =
        lm0 * hopping_zero_mode_inverse(lam).cast<std::complex<double>>();
    worst0 = std::max(worst0, (comp * pi - pi).norm());
  }
  return {make_check("inverse.closed_form", worst, 1e-10),
          make_check("inverse.zero_mode", worst0, 1e-10)};
}

std::vector<CheckResult> suite_hamiltonian(const RunConfig& cfg) {
  ProductSpace sp = space_from_config(cfg);
  bool closed_form = sp.automorphism().is_identity();
  int points = 100;
  std::vector<double> devs = parallel_sweep(points, cfg.workers, [&](int i) {
    Rng rng(cfg.seed + 17 * i + 1);
    ReducedPoint pt = random_reduced_point(sp, rng, cfg.orbit_scale);
    double h1 = sp.hamiltonian_constraint_form(pt);
    double h2 = sp.hamiltonian_deformation_form(pt);
    double dev = std::abs(h1 - h2);
    if (closed_form) {
      double h3 = hamiltonian_closed_form(sp, pt);
      dev = std::max(dev, std::abs(h1 - h3));
    }
    return dev / std::max(1.0, std::abs(h1));
  });
  double worst = *std::max_element(devs.begin(), devs.end());
  return {make_check(closed_form ? "hamiltonian.triple_equality"
                                 : "hamiltonian.two_routes",
                     worst, 1e-10)};
}

std::vector<CheckResult> suite_involution(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  int nmat = std::max(2, std::min(4, cfg.rank + 1));
  ProjectionSystem sys(sun_realization_cache(nmat), cfg.coupling());
  double worst_inv = 0.0, worst_flow = 0.0, worst_comp = 0.0;
  for (int it = 0; it < 25; ++it) {
    UnreducedPoint pt = sys.random_constrained_point(rng, cfg.orbit_scale);
    for (int du = 2; du <= nmat; ++du) {
      for (int dv = du; dv <= nmat; ++dv) {
        double u = uniform(rng, 0.4, 2.0);
        double v = -uniform(rng, 0.4, 2.0);
        worst_inv = std::max(worst_inv,
                             std::abs(sys.poisson_bracket(
                                 sys.charge_trace_observable(du, u),
                                 sys.charge_trace_observable(dv, v), pt)));
      }
    }
    MatrixList c0 = sys.charge_field(pt, 0.9);
    MatrixList c1 = sys.charge_field(sys.free_flow(1.3, pt), 0.9);
    for (int k = 0; k < sys.n(); ++k)
      worst_flow = std::max(worst_flow, (c0[k] - c1[k]).norm());

    // componentwise bracket identity
    double u = uniform(rng, 0.5, 1.5), v = uniform(rng, 1.8, 2.6);
    MatrixList x(sys.n()), y(sys.n());
    for (int k = 0; k < sys.n(); ++k) {
      x[k] = sys.realization().to_matrix(
          gaussian_vector(rng, sys.realization().algebra().dim));
      y[k] = sys.realization().to_matrix(
          gaussian_vector(rng, sys.realization().algebra().dim));
    }
    double lhs = sys.poisson_bracket(sys.charge_component_observable(x, u),
                                     sys.charge_component_observable(y, v), pt);
    MatrixList comm(sys.n());
    for (int k = 0; k < sys.n(); ++k) comm[k] = x[k] * y[k] - y[k] * x[k];
    double rhs = (u - 1) / (u - v) * sys.weighted_inner(sys.charge_field(pt, u), comm) +
                 (v - 1) / (v - u) * sys.weighted_inner(sys.charge_field(pt, v), comm);
    worst_comp = std::max(worst_comp,
                          std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return {make_check("involution.trace_family", worst_inv, 1e-8),
          make_check("involution.flow_invariance", worst_flow, 1e-12),
          make_check("involution.component_identity", worst_comp, 1e-8)};
}

std::vector<CheckResult> suite_ym(const RunConfig& cfg) {
  const SimpleLieAlgebra& alg = algebra_cache(cfg.family, cfg.rank);
  DiagramAutomorphism aut = diagram_automorphism(alg, cfg.gamma_order);
  Rng rng(cfg.seed);
  Eigen::VectorXd marks = cfg.mark_vector();
  CouplingVector lam = coupling_from_marks(marks);
  ProductSpace space(alg, aut, lam);
  double worst_jump = 0.0, worst_energy = 0.0, worst_theta = 0.0, worst_rt = 0.0;
  for (int it = 0; it < 20; ++it) {
    ProductVector xi = random_orbit_spin(space, rng, cfg.orbit_scale);
    std::vector<AlgebraVector> charges(space.n());
    for (int k = 0; k < space.n(); ++k)
      charges[k] = lam.lambdas[k] * space.component(xi, k);
    AlgebraVector chi = random_alcove_point(alg, aut, rng, 0.1);
    AlgebraVector p = space.fixed_cartan() *
                      gaussian_vector(rng, static_cast<int>(space.fixed_cartan().cols()));
    FieldConfig field = solve_slice(alg, aut, marks, charges, chi, p);
    worst_jump = std::max(worst_jump, jump_residual(field));
    SliceData sd = slice_to_reduced(field);
    worst_energy = std::max(
        worst_energy, std::abs(field_energy(field) - space.inner(sd.j, sd.j)));
    worst_theta = std::max(worst_theta, theta_pairing_check(field));
    FieldConfig back = solve_slice(alg, aut, field.marks, field.charges,
                                   sd.point.q, sd.point.p);
    for (int k = 0; k < space.n(); ++k)
      worst_rt = std::max(worst_rt,
                          (back.plus_limits[k] - field.plus_limits[k]).norm());
  }
  return {make_check("ym.jump_conditions", worst_jump, 1e-10),
          make_check("ym.energy_equality", worst_energy, 1e-12),
          make_check("ym.theta_pairing", worst_theta, 1e-10),
          make_check("ym.slice_round_trip", worst_rt, 1e-12)};
}

std::vector<CheckResult> suite_appendix_a(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  int nmat = std::max(2, std::min(3, cfg.rank + 1));
  const SunRealization& real = sun_realization_cache(nmat);
  const SimpleLieAlgebra& alg = real.algebra();
  double worst_gauge = 0.0, worst_per = 0.0, worst_dress = 0.0;
  for (int it = 0; it < 8; ++it) {
    std::vector<Eigen::MatrixXcd> coef;
    for (int m = 0; m < 5; ++m)
      coef.push_back(real.to_matrix(gaussian_vector(rng, alg.dim, 0.5)));
    ConnectionSample a;
    a.n = nmat;
    a.base = [coef](double x) {
      Eigen::MatrixXcd v = coef[0];
      v += std::sin(2 * M_PI * x) * coef[1] + std::cos(2 * M_PI * x) * coef[2];
      v += std::sin(4 * M_PI * x) * coef[3] + std::cos(4 * M_PI * x) * coef[4];
      return v;
    };
    ConstantGauge g = gauge_to_constant(real, a);
    const double h = 1e-3;
    for (double x : {0.2, 0.55, 0.9}) {
      std::vector<double> xs{x - 2 * h, x - h, x, x + h, x + 2 * h};
      auto gs = g.path(xs);
      Eigen::MatrixXcd gdot =
          (-gs[4] + 8.0 * gs[3] - 8.0 * gs[1] + gs[0]) / (12.0 * h);
      Eigen::MatrixXcd gi = gs[2].inverse();
      worst_gauge = std::max(
          worst_gauge, (gs[2] * a.at(x) * gi - gdot * gi - g.chi_mat).norm());
    }
    auto gs = g.path({0.35, 1.35});
    worst_per = std::max(worst_per, (gs[1] - gs[0]).norm());

    Eigen::MatrixXcd x1 = real.to_matrix(gaussian_vector(rng, alg.dim, 0.4));
    auto th = [](double x) { return std::sin(2 * M_PI * x); };
    auto dth = [](double x) { return 2 * M_PI * std::cos(2 * M_PI * x); };
    auto gfun = [x1, th](double x) { return Eigen::MatrixXcd(sun_exp(th(x) * x1)); };
    auto gdot = [x1, th, dth](double x) {
      return Eigen::MatrixXcd(dth(x) * x1 * sun_exp(th(x) * x1));
    };
    ConstantGauge g2 = gauge_to_constant(real, gauge_transform(a, gfun, gdot));
    worst_dress = std::max(worst_dress, (g2.chi - g.chi).norm());
  }
  return {make_check("appendixA.gauge_identity", worst_gauge, 1e-8),
          make_check("appendixA.quasi_periodicity", worst_per, 1e-9),
          make_check("appendixA.monodromy_invariance", worst_dress, 1e-9)};
}

std::vector<CheckResult> suite_quantum(const RunConfig&) {
  WeightToolkit su2(build_root_system(Family::A, 1));
  double worst_cas = 0.0;
  for (int m = 0; m <= 20; ++m) {
    auto rep = su2_rep_matrices(m);
    Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    for (const auto& r : rep) omega -= r * r;
    double want = su2.casimir_pairing(Weight::Constant(1, m));
    worst_cas = std::max(
        worst_cas,
        (omega - want * Eigen::MatrixXcd::Identity(m + 1, m + 1)).norm());
  }
  long bad_triangle = 0;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b)
      for (int c = 0; c <= 20; ++c) {
        long n0 = 0, n2 = 0;
        for (int i = -a; i <= a; i += 2)
          for (int j = -b; j <= b; j += 2) {
            int k0 = -i - j, k2 = 2 - i - j;
            if (std::abs(k0) <= c && (c - std::abs(k0)) % 2 == 0) ++n0;
            if (std::abs(k2) <= c && (c - std::abs(k2)) % 2 == 0) ++n2;
          }
        if (su2_triangle_singlet(a, b, c) != n0 - n2) ++bad_triangle;
      }
  double wc2 = std::abs(weyl_constant(build_root_system(Family::A, 1)) + 0.25);
  double wc3 = std::abs(weyl_constant(build_root_system(Family::A, 2)) + 1.0);
  return {make_check("quantum.casimir_bruteforce", worst_cas, 1e-12),
          make_check("quantum.triangle_rule", static_cast<double>(bad_triangle), 0.5),
          make_check("quantum.weyl_constant", std::max(wc2, wc3), 1e-13)};
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_algebra(const RunConfig& cfg) {
  const SimpleLieAlgebra& alg = algebra_cache(cfg.family, cfg.rank);
  Json j = algebra_descriptor(alg);
  j["schema"] = "twistred-algebra/1";
  fs::create_directories(cfg.out_dir);
  write_json_file(cfg.out_dir + "/algebra.json", j);
  std::printf("%s: dim %d, positive roots %d, C = %.12g\n",
              family_name(alg.family, alg.rank).c_str(), alg.dim, alg.npos,
              alg.normalization_constant);
  return 0;
}

int cmd_hamiltonian(const RunConfig& cfg) {
  ProductSpace sp = space_from_config(cfg);
  Rng rng(cfg.seed);
  ReducedPoint pt = random_reduced_point(sp, rng, cfg.orbit_scale);
  double h1 = sp.hamiltonian_constraint_form(pt);
  double h2 = sp.hamiltonian_deformation_form(pt);
  Json values{{"constraint_form", h1}, {"deformation_form", h2}};
  double dev = std::abs(h1 - h2);
  if (sp.automorphism().is_identity()) {
    double h3 = hamiltonian_closed_form(sp, pt);
    values["closed_form"] = h3;
    dev = std::max({dev, std::abs(h1 - h3), std::abs(h2 - h3)});
  }
  auto checks = suite_hamiltonian(cfg);
  Json report{{"schema", "twistred-report/1"},
              {"command", "hamiltonian"},
              {"seed", cfg.seed},
              {"values", values},
              {"max_pairwise_deviation", dev},
              {"sweep", results_to_json(checks)},
              {"point", reduced_point_to_json(sp, pt)}};
  fs::create_directories(cfg.out_dir);
  write_json_file(cfg.out_dir + "/hamiltonian.json", report);
  bool ok = print_results(checks);
  std::printf("H values: %.15g / %.15g, max deviation %.3e\n", h1, h2, dev);
  return ok ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.family != Family::A || cfg.gamma_order != 1)
    throw ValidationError("simulate: requires an A-family algebra with gamma = id");
  ProductSpace sp = space_from_config(cfg);
  ProjectionSystem sys(sun_realization_cache(cfg.rank + 1), cfg.coupling());
  Rng rng(cfg.seed);
  ReducedPoint start = random_reduced_point(sp, rng, cfg.orbit_scale);
  std::vector<double> grid = time_grid(cfg);

  Trajectory proj = sys.project_trajectory(start, grid);
  Trajectory integ = integrate_reduced(sp, start, grid);

  fs::create_directories(cfg.out_dir);
  write_trajectory_csv(cfg.out_dir + "/projection.csv", sp, proj);
  write_trajectory_csv(cfg.out_dir + "/integrated.csv", sp, integ);
  {
    std::ofstream plot(cfg.out_dir + "/trajectory.gnuplot");
    plot << "set datafile separator ','\nset key autotitle columnhead\n"
         << "set xlabel 't'\n"
         << "plot 'projection.csv' using 1:2 with lines, \\\n"
         << "     'integrated.csv' using 1:2 with lines dashtype 2\n";
  }

  std::size_t rows = std::min(proj.samples.size(), integ.samples.size());
  double dev_q = 0.0, dev_p = 0.0, dev_h = 0.0, dev_orb = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    dev_q = std::max(dev_q,
                     (proj.samples[i].point.q - integ.samples[i].point.q).norm());
    dev_p = std::max(dev_p,
                     (proj.samples[i].point.p - integ.samples[i].point.p).norm());
    dev_h = std::max(dev_h,
                     std::abs(proj.samples[i].energy - integ.samples[i].energy));
    for (int k = 0; k < sp.n(); ++k) {
      Eigen::VectorXd i0 = orbit_invariants(
          sp.algebra(), sp.component(proj.samples[i].point.xi, k));
      Eigen::VectorXd i1 = orbit_invariants(
          sp.algebra(), sp.component(integ.samples[i].point.xi, k));
      dev_orb = std::max(dev_orb, (i0 - i1).norm());
    }
  }
  bool truncated = proj.status != "ok" || integ.status != "ok";
  Json report{{"schema", "twistred-report/1"},
              {"command", "simulate"},
              {"algebra", family_name(cfg.family, cfg.rank)},
              {"N", cfg.n},
              {"lambdas", to_json(cfg.coupling().lambdas)},
              {"tolerances", {{"rtol", 1e-10}, {"atol", 1e-12}, {"wall_guard", 1e-6}}},
              {"seed", cfg.seed},
              {"rows_compared", rows},
              {"deviation", {{"q", dev_q}, {"p", dev_p}, {"H", dev_h},
                             {"orbit_invariants", dev_orb}}},
              {"projection_status", proj.status},
              {"integrated_status", integ.status},
              {"projection_energy_drift", proj.max_energy_drift},
              {"integrated_energy_drift", integ.max_energy_drift}};
  if (truncated) {
    report["truncated_at"] =
        proj.status != "ok" ? proj.truncated_at : integ.truncated_at;
  }
  write_json_file(cfg.out_dir + "/simulate.json", report);
  std::printf("simulate: %zu rows, dev q %.3e p %.3e H %.3e orbits %.3e\n", rows,
              dev_q, dev_p, dev_h, dev_orb);
  if (truncated) {
    std::printf("trajectory truncated (wall approach)\n");
    return 3;
  }
  double tol = 1e-6;
  return (dev_q < tol && dev_p < tol && dev_h < tol && dev_orb < tol) ? 0 : 2;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  std::vector<CheckResult> results;
  auto run = [&](const std::string& name) {
    if (name == "lemma1") return suite_lemma1(cfg);
    if (name == "lemma2") return suite_lemma2(cfg);
    if (name == "inverse") return suite_inverse(cfg);
    if (name == "hamiltonian") return suite_hamiltonian(cfg);
    if (name == "involution") return suite_involution(cfg);
    if (name == "ym") return suite_ym(cfg);
    if (name == "appendixA") return suite_appendix_a(cfg);
    if (name == "quantum") return suite_quantum(cfg);
    throw ValidationError("unknown verify suite '" + name + "'");
  };
  if (suite == "all") {
    for (const char* s : {"lemma1", "lemma2", "inverse", "hamiltonian",
                          "involution", "ym", "appendixA", "quantum"}) {
      auto r = run(s);
      results.insert(results.end(), r.begin(), r.end());
    }
  } else {
    results = run(suite);
  }
  bool ok = print_results(results);
  Json report{{"schema", "twistred-report/1"},
              {"command", "verify"},
              {"suite", suite},
              {"seed", cfg.seed},
              {"checks", results_to_json(results)},
              {"pass", ok}};
  fs::create_directories(cfg.out_dir);
  write_json_file(cfg.out_dir + "/verify_" + suite + ".json", report);
  return ok ? 0 : 2;
}

int cmd_ym(const RunConfig& cfg) {
  auto checks = suite_ym(cfg);
  bool ok = print_results(checks);

  // also emit one concrete configuration
  const SimpleLieAlgebra& alg = algebra_cache(cfg.family, cfg.rank);
  DiagramAutomorphism aut = diagram_automorphism(alg, cfg.gamma_order);
  Rng rng(cfg.seed);
  Eigen::VectorXd marks = cfg.mark_vector();
  CouplingVector lam = coupling_from_marks(marks);
  ProductSpace space(alg, aut, lam);
  ProductVector xi = random_orbit_spin(space, rng, cfg.orbit_scale);
  std::vector<AlgebraVector> charges(space.n());
  for (int k = 0; k < space.n(); ++k)
    charges[k] = lam.lambdas[k] * space.component(xi, k);
  AlgebraVector chi = random_alcove_point(alg, aut, rng, 0.1);
  AlgebraVector p = space.fixed_cartan() *
                    gaussian_vector(rng, static_cast<int>(space.fixed_cartan().cols()));
  FieldConfig field = solve_slice(alg, aut, marks, charges, chi, p);
  Json report{{"schema", "twistred-report/1"},
              {"command", "ym"},
              {"seed", cfg.seed},
              {"checks", results_to_json(checks)},
              {"field", field_config_to_json(field)},
              {"pass", ok}};
  fs::create_directories(cfg.out_dir);
  write_json_file(cfg.out_dir + "/ym.json", report);

  // Wilson line sample dump of the constant connection e^{chi}-generator
  if (cfg.family == Family::A && cfg.gamma_order == 1) {
    const SunRealization& real = sun_realization_cache(cfg.rank + 1);
    Eigen::MatrixXcd chi_mat = real.to_matrix(chi);
    ConnectionSample conn;
    conn.n = real.n();
    conn.base = [chi_mat](double) { return chi_mat; };
    std::vector<double> xs;
    for (int i = 0; i <= 50; ++i) xs.push_back(i / 50.0);
    write_wilson_csv(cfg.out_dir + "/wilson.csv", conn, xs);
  }
  return ok ? 0 : 2;
}

int cmd_spectrum(const RunConfig& cfg) {
  WeightToolkit wt(build_root_system(cfg.family, cfg.rank));
  const SimpleLieAlgebra& alg = algebra_cache(cfg.family, cfg.rank);
  DiagramAutomorphism aut = diagram_automorphism(alg, cfg.gamma_order);
  CouplingVector lam = cfg.coupling();
  std::vector<Weight> nu(cfg.n, Weight::Zero(cfg.rank));
  if (!cfg.spectrum_nu.empty()) {
    if (static_cast<int>(cfg.spectrum_nu.size()) != cfg.n)
      throw ValidationError("spectrum: nu must have one row per factor");
    nu = cfg.spectrum_nu;
  }
  auto levels =
      enumerate_levels(wt, aut.node_perm, lam.lambdas, nu, cfg.spectrum_cutoff);

  fs::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/spectrum.csv");
  csv << "energy,multiplicity";
  for (int k = 0; k < cfg.n; ++k)
    for (int j = 0; j < cfg.rank; ++j) csv << ",L" << k << "_" << j;
  csv << "\n";
  char buf[64];
  for (const auto& lv : levels) {
    std::snprintf(buf, sizeof(buf), "%.17g", lv.energy);
    csv << buf << "," << lv.multiplicity;
    for (const auto& w : lv.weights)
      for (int j = 0; j < w.size(); ++j) csv << "," << w[j];
    csv << "\n";
  }
  Json report{{"schema", "twistred-report/1"},
              {"command", "spectrum"},
              {"levels", levels.size()},
              {"cutoff", cfg.spectrum_cutoff},
              {"weyl_constant", weyl_constant(wt.roots())},
              {"gamma_order", cfg.gamma_order}};
  write_json_file(cfg.out_dir + "/spectrum.json", report);
  std::printf("spectrum: %zu levels up to energy %.6g (additive constant %.6g)\n",
              levels.size(), cfg.spectrum_cutoff, weyl_constant(wt.roots()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twisted-reduction spin Sutherland toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, suite = "all";
  long seed_override = -1;
  int workers_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed_override, "override the configured seed");
    sub->add_option("--out", out_override, "override the output directory");
    sub->add_option("--workers", workers_override, "bound for parallel sweeps");
  };

  CLI::App* c_algebra = app.add_subcommand("algebra", "algebra descriptor");
  CLI::App* c_ham = app.add_subcommand("hamiltonian", "reduced Hamiltonian routes");
  CLI::App* c_sim = app.add_subcommand("simulate", "projection vs integrated flow");
  CLI::App* c_verify = app.add_subcommand("verify", "property suites");
  CLI::App* c_ym = app.add_subcommand("ym", "cylinder correspondence report");
  CLI::App* c_spec = app.add_subcommand("spectrum", "quantum level table");
  for (CLI::App* sub : {c_algebra, c_ham, c_sim, c_verify, c_ym, c_spec})
    add_common(sub);
  c_verify->add_option("suite", suite,
                       "lemma1|lemma2|inverse|hamiltonian|involution|ym|"
                       "appendixA|quantum|all");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_run_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<unsigned long>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (workers_override > 0) cfg.workers = workers_override;

    if (c_algebra->parsed()) return cmd_algebra(cfg);
    if (c_ham->parsed()) return cmd_hamiltonian(cfg);
    if (c_sim->parsed()) return cmd_simulate(cfg);
    if (c_verify->parsed()) return cmd_verify(cfg, suite);
    if (c_ym->parsed()) return cmd_ym(cfg);
    if (c_spec->parsed()) return cmd_spectrum(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const NonGenericError& e) {
    std::cerr << "non-generic input: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
