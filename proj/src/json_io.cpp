#include "twistred/json_io.hpp"

#include <fstream>

namespace twistred {

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(j.size());
  int i = 0;
  for (const auto& e : j) v[i++] = e.get<double>();
  return v;
}

Json algebra_descriptor(const SimpleLieAlgebra& alg) {
  Json roots = Json::array();
  for (const auto& r : alg.roots.positive) {
    Json w = Json::array();
    Eigen::VectorXi wc = alg.roots.weight_coords(r);
    for (int i = 0; i < wc.size(); ++i) w.push_back(wc[i]);
    roots.push_back(w);
  }
  Json cartan = Json::array();
  for (int i = 0; i < alg.rank; ++i) {
    Json row = Json::array();
    for (int j = 0; j < alg.rank; ++j) row.push_back(alg.roots.cartan(i, j));
    cartan.push_back(row);
  }
  return Json{{"family", family_name(alg.family, alg.rank).substr(0, 1)},
              {"rank", alg.rank},
              {"dimension", alg.dim},
              {"roots", roots},
              {"cartan_matrix", cartan},
              {"normalization_constant", alg.normalization_constant}};
}

Json to_json(const CouplingVector& lam) {
  return Json{{"lambdas", to_json(lam.lambdas)}, {"b", to_json(lam.b)}};
}

Json reduced_point_to_json(const ProductSpace& space, const ReducedPoint& pt) {
  Json xi = Json::array();
  for (int k = 0; k < space.n(); ++k)
    xi.push_back(to_json(space.component(pt.xi, k)));
  return Json{{"q", to_json(pt.q)}, {"p", to_json(pt.p)}, {"xi", xi}};
}

ReducedPoint reduced_point_from_json(const ProductSpace& space, const Json& j) {
  ReducedPoint pt;
  pt.q = vector_from_json(j.at("q"));
  pt.p = vector_from_json(j.at("p"));
  pt.xi.resize(space.pdim());
  int k = 0;
  for (const auto& comp : j.at("xi")) {
    if (k >= space.n()) throw ValidationError("reduced point: too many components");
    pt.xi.segment(k * space.adim(), space.adim()) = vector_from_json(comp);
    ++k;
  }
  space.validate(pt);
  return pt;
}

Json field_config_to_json(const FieldConfig& cfg) {
  Json charges = Json::array(), plus = Json::array();
  for (const auto& z : cfg.charges) charges.push_back(to_json(z));
  for (const auto& e : cfg.plus_limits) plus.push_back(to_json(e));
  return Json{{"marks", to_json(cfg.marks)},
              {"charges", charges},
              {"chi", to_json(cfg.chi)},
              {"plus_limits", plus},
              {"momentum", to_json(cfg.momentum)},
              {"family", family_name(cfg.alg->family, cfg.alg->rank)},
              {"gamma_order", cfg.gamma.order}};
}

CouplingVector RunConfig::coupling() const {
  if (lambdas) return CouplingVector(*lambdas);
  return coupling_from_marks(*marks);
}

Eigen::VectorXd RunConfig::mark_vector() const {
  if (marks) return *marks;
  // place the marks so that x_k - x_{k-1} = 1/lambda_k with x_N = 1 - eps:
  // anchor the last mark at 1 - 1/(2 lambda_1) so all marks stay in (0,1)
  CouplingVector lam(*lambdas);
  int n = lam.n();
  double anchor = 1.0 - 0.5 / lam.lambdas[0];
  Eigen::VectorXd m(n);
  m[n - 1] = anchor;
  for (int k = n - 1; k >= 1; --k) m[k - 1] = m[k] - 1.0 / lam.lambdas[k];
  for (int k = 0; k < n; ++k) m[k] += 0.0;
  if (m[0] <= 0.0)
    throw ValidationError("derived marks left (0,1); give marks explicitly");
  return m;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  if (j.contains("algebra")) {
    cfg.family = family_from_string(j["algebra"].value("family", "A"));
    cfg.rank = j["algebra"].value("rank", 1);
  }
  cfg.gamma_order = j.value("gamma_order", 1);
  if (j.contains("lambdas")) cfg.lambdas = vector_from_json(j["lambdas"]);
  if (j.contains("marks")) cfg.marks = vector_from_json(j["marks"]);
  if (cfg.lambdas && cfg.marks)
    throw ValidationError("config: give exactly one of lambdas/marks");
  if (!cfg.lambdas && !cfg.marks)
    throw ValidationError("config: one of lambdas/marks is required");
  cfg.n = static_cast<int>(cfg.lambdas ? cfg.lambdas->size() : cfg.marks->size());
  if (j.contains("N") && j["N"].get<int>() != cfg.n)
    throw ValidationError("config: N does not match the coupling data");
  cfg.orbit_scale = j.value("orbit_scale", 1.0);
  cfg.seed = j.value("seed", 1UL);
  if (j.contains("tolerances")) cfg.tol_verify = j["tolerances"].value("verify", 1e-8);
  if (cfg.tol_verify <= 0) throw ValidationError("config: tolerances must be positive");
  if (j.contains("time_grid")) {
    cfg.t0 = j["time_grid"].value("t0", 0.0);
    cfg.t1 = j["time_grid"].value("t1", 1.0);
    cfg.samples = j["time_grid"].value("samples", 101);
  }
  cfg.out_dir = j.value("out_dir", ".");
  if (j.contains("spectrum")) {
    cfg.spectrum_cutoff = j["spectrum"].value("cutoff", 10.0);
    if (j["spectrum"].contains("nu")) {
      for (const auto& row : j["spectrum"]["nu"]) {
        Eigen::VectorXi w(row.size());
        int i = 0;
        for (const auto& e : row) w[i++] = e.get<int>();
        cfg.spectrum_nu.push_back(w);
      }
    }
  }
  cfg.workers = j.value("workers", 1);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  Json j;
  in >> j;
  return run_config_from_json(j);
}

Json to_json(const RunConfig& cfg) {
  Json j{{"schema", "twistred-run/1"},
         {"algebra", {{"family", family_name(cfg.family, cfg.rank).substr(0, 1)},
                      {"rank", cfg.rank}}},
         {"gamma_order", cfg.gamma_order},
         {"N", cfg.n},
         {"orbit_scale", cfg.orbit_scale},
         {"seed", cfg.seed},
         {"tolerances", {{"verify", cfg.tol_verify}}},
         {"time_grid", {{"t0", cfg.t0}, {"t1", cfg.t1}, {"samples", cfg.samples}}},
         {"out_dir", cfg.out_dir},
         {"workers", cfg.workers}};
  if (cfg.lambdas) j["lambdas"] = to_json(*cfg.lambdas);
  if (cfg.marks) j["marks"] = to_json(*cfg.marks);
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file " + path);
  out << j.dump(2) << "\n";
}

}  // namespace twistred
