#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "chernoff/kernel_matrix.hpp"
#include "chernoff/sampled.hpp"

namespace chernoff {

// Metric star graph: one vertex, d external edges, each truncated to [0, R]
// with a uniform grid. SampledFunction layout: slot 0 is the shared vertex
// value, edge k node i (x = i h, i = 1..edge_nodes-1) lives at
// 1 + k (edge_nodes - 1) + (i - 1).
struct StarGraphSpace {
  int edges = 1;
  double extent = 10.0;  // R
  int edge_nodes = 201;  // nodes per edge including the vertex
  double h = 0.05;

  static StarGraphSpace make(int edges, double extent, int edge_nodes);

  std::size_t size() const {
    return 1 + (std::size_t)edges * (edge_nodes - 1);
  }
  std::size_t index(int edge, int i) const {  // i >= 1
    return 1 + (std::size_t)edge * (edge_nodes - 1) + (i - 1);
  }
  // (edge, x) of a slot; edge == -1 for the vertex
  std::pair<int, double> locate(std::size_t idx) const {
    if (idx == 0) return {-1, 0.0};
    const std::size_t e = (idx - 1) / (edge_nodes - 1);
    const std::size_t i = (idx - 1) % (edge_nodes - 1) + 1;
    return {(int)e, h * i};
  }
  SampledFunction sample(const std::function<double(int, double)>& f) const;
};

enum class VertexRegime { interior, absorbing_free, sticky_killed };
// interior:      a + c in (0,1)  (needs gamma > 0; c = 0 is rejected)
// absorbing_free: a + c = 0      (pure edge-entry weights)
// sticky_killed: a + c = 1       (no edge re-entry; sticky vertex, killing)

struct BoundaryWeights {
  double a = 0.0;
  double c = 0.0;
  std::vector<double> b;
  VertexRegime regime = VertexRegime::absorbing_free;
  // derived (interior regime)
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<double> w;

  static BoundaryWeights make(double a, double c, std::vector<double> b);
};

// g(t,z) = (2 pi t)^{-1/2} e^{-z^2/(2t)}
double g_kernel(double t, double z);

// g_{beta,gamma}(t,z) =
//   (1/gamma^2) (2 pi)^{-1/2} int_0^t (s+gamma z)/(t-s)^{3/2}
//        exp(-(s+gamma z)^2 / (2 gamma^2 (t-s))) e^{-beta s/gamma} ds
// computed through the substitution u = (s + gamma z)/(gamma sqrt(t-s)), which
// turns the integrand into a Gaussian-weighted smooth function on [z/sqrt(t), inf).
// Adaptive quadrature, reported error < 1e-8.
double g_beta_gamma(double beta, double gamma, double t, double z);

// Vertex hit-and-survive mass for the a+c=1 regime:
//   int_0^t e^{-beta(t-s)} x/sqrt(2 pi s^3) e^{-x^2/(2s)} ds
double vertex_hit_mass(double beta, double t, double x);

// (log t, z/sqrt(t)) lookup table for g_{beta,gamma}; rebuilt when (beta,gamma)
// change, levels built lazily, read-only once built.
class GBetaGammaTable {
 public:
  GBetaGammaTable(double beta, double gamma, double zeta_max = 16.0,
                  int zeta_nodes = 1024);
  double value(double t, double z) const;
  // build every level a value() call in [tmin, tmax] could read; value() is
  // then safe to call concurrently
  void prebuild(double tmin, double tmax) const;

 private:
  const std::vector<double>& level(int k) const;
  double beta_, gamma_, zeta_max_;
  int zeta_nodes_;
  double log_step_;
  mutable std::map<int, std::vector<double>> levels_;
};

struct KernelRow {
  std::vector<double> density;  // at every grid slot (vertex slot = limit value, unused for quadrature)
  double atom = 0.0;            // delta_v mass
};

// Transition kernel P(t, xi, .) for a source at (edge,x) (edge = -1, x = 0 for
// the vertex). Exact formulas; g_{beta,gamma} through `table` when given,
// direct adaptive quadrature otherwise.
KernelRow transition_kernel(const BoundaryWeights& weights,
                            const StarGraphSpace& space, double t, int edge,
                            double x, const GBetaGammaTable* table = nullptr);

// Total kernel mass (trapezoid density integral + atom) of a row.
double kernel_row_mass(const KernelRow& row, const StarGraphSpace& space);

// Coefficient fields on the graph, evaluated at (edge, x); edge = -1 at v.
struct GraphCoefficients {
  std::function<double(int, double)> A;  // 0 < alpha <= A <= alpha_bar
  std::function<double(int, double)> B;  // B(v) = 0
  std::function<double(int, double)> C;  // >= 0
};

// F(t)phi(xi) = e^{-t C(xi)} int phi(zeta) P(A(xi_s) t, xi_s, dzeta),
// xi_s = xi + t B(xi) clamped to v when the shift crosses the vertex.
class GraphStep {
 public:
  GraphStep(StarGraphSpace space, BoundaryWeights weights,
            GraphCoefficients coeffs);

  const StarGraphSpace& space() const { return space_; }
  SampledFunction apply(double t, const SampledFunction& phi) const;
  // one full kernel matrix at fixed t (columns carry quadrature weights and
  // the vertex-atom column); used by dump-kernel and cached across powers
  std::shared_ptr<const KernelMatrix> matrix(double t) const;

 private:
  StarGraphSpace space_;
  BoundaryWeights weights_;
  GraphCoefficients coeffs_;
  std::unique_ptr<GBetaGammaTable> table_;
  mutable std::vector<std::pair<double, std::shared_ptr<const KernelMatrix>>> cache_;
};

}  // namespace chernoff
