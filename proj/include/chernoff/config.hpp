#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chernoff/engine.hpp"
#include "chernoff/euclidean_diffusion.hpp"
#include "chernoff/manifold_circle.hpp"
#include "chernoff/star_graph.hpp"

#include <nlohmann/json_fwd.hpp>

namespace chernoff {

// Scalar coefficient expressions from the fixed catalog:
//   const:v
//   poly:c0,c1,c2|lo,hi     clipped polynomial in the coordinate
//   gauss:a,center,width[,base]
//   cosfield:a,k[,base]     periodic (circle) variant a cos(k x) + base
struct ScalarField {
  std::function<double(double)> eval;
  bool constant = false;
  double const_value = 0.0;
  std::string expr;

  static ScalarField parse(const std::string& expr);
};

struct PhiSpec {
  std::string kind = "gauss";  // gauss | cos
  double width = 1.0;
  double center = 0.0;
  int k = 1;
};

struct SpaceSpec {
  std::string kind = "r1";  // r1 | r2 | star | circle
  double extent = 20.0;
  int axis_nodes = 801;
  int edges = 1;
  int edge_nodes = 241;
  int circle_nodes = 256;
};

struct ExperimentConfig {
  SpaceSpec space;
  ScalarField A, B, C;
  // star-graph vertex weights
  double w_a = 0.0, w_c = 0.0;
  std::vector<double> w_b;
  BernsteinTriplet triplet;
  SubordinatorLaw law;
  MSchedule schedule;
  std::string family = "subordinate";  // subordinate | bounded-levy | variable-coeff
  double t = 1.0;
  std::vector<int> n_list;
  int eta_nodes = 64;
  double tail_tol = 1e-10;
  bool collapse_exact = true;
  bool allow_atomic_eta = false;
  PhiSpec phi;
  std::string oracle = "auto";
  // variable-coeff family fields
  ScalarField sigma_field, lambda_field;
  double lambda_min = 0.0, lambda_max = 0.0;
  std::string output = "out";
  std::uint64_t seed = 1;
  int threads = 0;
  double budget = 5e12;
  std::string raw_json;  // resolved config for the manifest

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path,
                                    const std::vector<std::string>& overrides);
};

// Everything a convergence run needs, assembled and validated.
struct Experiment {
  ExperimentConfig cfg;
  SubordinationConfig sub;
  ChernoffStep step;
  SampledFunction phi;
  std::size_t dim = 0;
  // family application (chosen by cfg.family)
  std::function<SampledFunction(double, const SampledFunction&)> family;
  // oracle of T^f_t phi, empty when cfg.oracle resolves to none
  std::function<SampledFunction(double)> oracle_at;
  // quadrature weight per node for the l2 error column
  std::vector<double> node_weights;
  // coordinate columns for CSV rows
  std::vector<std::string> coord_names;
  std::function<std::vector<double>(std::size_t)> coords;
  // kept alive for the closures above
  std::shared_ptr<void> keep_alive;
};

Experiment build_experiment(const ExperimentConfig& cfg);

}  // namespace chernoff
