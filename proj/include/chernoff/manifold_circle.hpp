#pragma once

#include <functional>
#include <vector>

#include "chernoff/sampled.hpp"

namespace chernoff {

// Unit circle, M uniform nodes theta_j = 2 pi j / M, volume weight 2 pi / M.
struct CircleGrid {
  int nodes = 256;

  static CircleGrid make(int nodes);
  std::size_t size() const { return (std::size_t)nodes; }
  double theta(std::size_t j) const { return 2.0 * M_PI * j / nodes; }
  double weight() const { return 2.0 * M_PI / nodes; }
  SampledFunction sample(const std::function<double(double)>& f) const;
};

enum class CircleKernel { k1_geodesic, k3_chordal };

// K_1(t,x,y) = (2 pi t)^{-1/2} exp(-arc(x,y)^2 / (2t)),
// arc = min(|x-y|, 2 pi - |x-y|)
double k1(double t, double x, double y);

// K_3(t,x,y) = (2 pi t)^{-1/2} exp(-(2 - 2 cos(x-y)) / (2t))  (chordal distance)
double k3(double t, double x, double y);

// F_i(t)phi(x) = int K_i phi dvol / int K_i dvol; F_i(0) = Id. The source
// point may sit off the grid (the kernels are analytic in x).
SampledFunction normalized_step(CircleKernel kernel, const CircleGrid& grid,
                                double t, const SampledFunction& phi);
double normalized_step_at(CircleKernel kernel, const CircleGrid& grid,
                          double t, const SampledFunction& phi, double x);
// normalization denominator int K_i(t,x,y) vol(dy) at a grid row
double normalization_denominator(CircleKernel kernel, const CircleGrid& grid,
                                 double t, double x);

struct CircleCoefficients {
  std::function<double(double)> A;  // >= a_min > 0
  std::function<double(double)> B;  // tangent speed, sign = direction
  std::function<double(double)> C;  // >= 0
};

// hat F_i(t) = e^{-tC} o S_t o tilde F_i(t):
//   hat F_i(t)phi(x) = e^{-t C(x)} (F_i(A(x_s) t) phi)(x_s),  x_s = x + t B(x)
SampledFunction hat_step(CircleKernel kernel, const CircleGrid& grid,
                         const CircleCoefficients& coeffs, double t,
                         const SampledFunction& phi);

}  // namespace chernoff
