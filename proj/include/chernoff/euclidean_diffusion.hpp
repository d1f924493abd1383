#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "chernoff/kernel_matrix.hpp"
#include "chernoff/sampled.hpp"

namespace chernoff {

// Uniform grid on [-R,R]^d, d in {1,2}. Functions vanish outside the box.
struct EuclideanGrid {
  int dim = 1;
  double extent = 10.0;   // per-axis half width R
  int axis_nodes = 201;   // per axis, >= 8
  double h = 0.1;
  // row-major for d=2: index = i * axis_nodes + j, x1 = coord(i), x2 = coord(j)

  static EuclideanGrid make(int dim, double extent, int axis_nodes);

  std::size_t size() const {
    return dim == 1 ? (std::size_t)axis_nodes
                    : (std::size_t)axis_nodes * axis_nodes;
  }
  double coord(int i) const { return -extent + h * i; }
  std::array<double, 2> point(std::size_t idx) const {
    if (dim == 1) return {coord((int)idx), 0.0};
    return {coord((int)(idx / axis_nodes)), coord((int)(idx % axis_nodes))};
  }
  // trapezoid quadrature weight of node idx
  double quad_weight(std::size_t idx) const;

  SampledFunction sample(const std::function<double(std::array<double, 2>)>& f) const;
};

// 2x2 symmetric matrix (a12 = 0 and a22 = 1 in 1-d).
struct SymMatrix2 {
  double a11 = 1.0, a12 = 0.0, a22 = 1.0;
};

struct DiffusionCoefficients {
  std::function<SymMatrix2(std::array<double, 2>)> A;
  std::function<std::array<double, 2>(std::array<double, 2>)> B;
  std::function<double(std::array<double, 2>)> C;
  bool constant = false;  // all three fields constant => F(t) is the exact semigroup
  std::uint64_t id = 0;   // cache key; assigned by make()

  static DiffusionCoefficients make(
      std::function<SymMatrix2(std::array<double, 2>)> A,
      std::function<std::array<double, 2>(std::array<double, 2>)> B,
      std::function<double(std::array<double, 2>)> C, bool constant);

  static DiffusionCoefficients constant_coeffs(SymMatrix2 A,
                                               std::array<double, 2> B,
                                               double C);
};

// Validates SPD of A (Cholesky), C >= 0 at every node; returns the smallest
// eigenvalue of A over the grid (used for the kernel/FD switch).
double validate_coefficients(const DiffusionCoefficients& c,
                             const EuclideanGrid& grid);

// p_A(t,x,y) = (det A(x) (2 pi t)^d)^{-1/2} exp(-A^{-1}(x)(x-y).(x-y)/(2t))
double kernel_pA(const SymMatrix2& A_at_x, int dim, double t,
                 std::array<double, 2> x, std::array<double, 2> y);

// Dense-kernel cache shared across the m(t) powers and iteration levels.
class EuclideanKernelCache {
 public:
  explicit EuclideanKernelCache(std::size_t max_bytes = size_t(512) << 20)
      : max_bytes_(max_bytes) {}
  std::shared_ptr<const KernelMatrix> get(double tau) const;
  void put(double tau, std::shared_ptr<const KernelMatrix> m);
  void clear();
  std::size_t bytes() const { return bytes_; }

 private:
  std::size_t max_bytes_;
  mutable std::size_t bytes_ = 0;
  mutable std::vector<std::pair<double, std::shared_ptr<const KernelMatrix>>> items_;
};

// The Chernoff step F(t) of the variable-coefficient diffusion.
//
// Two evaluation paths, switched on kernel resolvability:
//   tau * lambda_min(A) >= kTauAlias * h^2  -> dense trapezoid kernel rows
//   below                                   -> finite-difference Euler substeps
//                                              (shift by 3-point interpolation,
//                                              diffusion by the 5-point stencil)
// The f2-floor replaces the raw trapezoid in the range where the sampled
// Gaussian aliases (row mass errors up to ~28% at tau = h^2/10).
class DiffusionStep {
 public:
  DiffusionStep(EuclideanGrid grid, DiffusionCoefficients coeffs);

  const EuclideanGrid& grid() const { return grid_; }
  bool exact_semigroup() const { return coeffs_.constant; }
  double lambda_min() const { return lambda_min_; }
  // boundary truncation bound the grid was declared for
  double declared_truncation_bound() const { return trunc_bound_; }
  void set_declared_truncation_bound(double b) { trunc_bound_ = b; }

  SampledFunction apply(double t, const SampledFunction& phi) const;
  // row x evaluated at its own time times[x] (used by the variable-lambda
  // family and by tests); falls back to a single Euler stencil row when a
  // row's time is below the kernel floor
  SampledFunction apply_rowwise(const std::vector<double>& times,
                                const SampledFunction& phi) const;

  EuclideanKernelCache& cache() const { return cache_; }

 private:
  std::shared_ptr<const KernelMatrix> kernel_matrix(double tau) const;
  SampledFunction apply_fd(double tau, const SampledFunction& phi) const;

  EuclideanGrid grid_;
  DiffusionCoefficients coeffs_;
  double lambda_min_ = 1.0;
  double tr_max_ = 1.0;
  double trunc_bound_ = 1e-3;
  mutable EuclideanKernelCache cache_;
  // per-node precomputed coefficient values
  std::vector<SymMatrix2> a_;
  std::vector<std::array<double, 2>> b_;
  std::vector<double> c_;
};

// aliasing threshold: trapezoid Gaussian mass error 2 e^{-2 pi^2 tau/h^2} < 5e-7
inline constexpr double kTauAlias = 0.735;

}  // namespace chernoff
