#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "twistred/product_space.hpp"
#include "twistred/ym.hpp"

namespace twistred {

using Json = nlohmann::json;

Json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

/// {family, rank, roots, cartan_matrix, normalization_constant}
Json algebra_descriptor(const SimpleLieAlgebra& alg);

Json to_json(const CouplingVector& lam);

Json reduced_point_to_json(const ProductSpace& space, const ReducedPoint& pt);
ReducedPoint reduced_point_from_json(const ProductSpace& space, const Json& j);

/// {marks[], charges[][], chi[], plus_limits[][]} plus run metadata.
Json field_config_to_json(const FieldConfig& cfg);

/// Run configuration shared by the command-line tools.
struct RunConfig {
  Family family = Family::A;
  int rank = 1;
  int gamma_order = 1;
  int n = 1;
  std::optional<Eigen::VectorXd> lambdas;  // exactly one of lambdas/marks
  std::optional<Eigen::VectorXd> marks;
  double orbit_scale = 1.0;
  unsigned long seed = 1;
  double tol_verify = 1e-8;
  double t0 = 0.0, t1 = 1.0;
  int samples = 101;
  std::string out_dir = ".";
  double spectrum_cutoff = 10.0;
  std::vector<Eigen::VectorXi> spectrum_nu;  // per-factor orbit labels
  int workers = 1;

  CouplingVector coupling() const;
  Eigen::VectorXd mark_vector() const;  // derived from lambdas when absent
};

RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::string& path);
Json to_json(const RunConfig& cfg);

void write_json_file(const std::string& path, const Json& j);

}  // namespace twistred
