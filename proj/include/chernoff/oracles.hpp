#pragma once

#include <array>
#include <functional>

#include "chernoff/euclidean_diffusion.hpp"
#include "chernoff/manifold_circle.hpp"
#include "chernoff/sampled.hpp"
#include "chernoff/star_graph.hpp"

namespace chernoff {

// Closed-form reference semigroups used as independent oracles. Every formula
// here is analytic (erf/exp level); none reuses the step machinery.

// Gaussian bump e^{-(x-center)^2 / (2 width^2)} (first axis only in 2-d tests).
struct GaussBump {
  double width = 1.0;
  double center = 0.0;
  double eval(double x) const {
    const double d = x - center;
    return std::exp(-d * d / (2.0 * width * width));
  }
};

// Constant-coefficient heat semigroup acting on a Gaussian bump on R^1:
// e^{t(a/2 d^2/dx^2 + b d/dx - c)} applied analytically, sampled on the grid.
SampledFunction heat_on_gauss(const EuclideanGrid& grid, const GaussBump& phi,
                              double a, double b, double c, double s);

// Reflected half-line heat semigroup (Neumann at 0) on a Gaussian bump,
// sampled on edge 0 of a star graph (d=1, a=c=0, b=1 scenario).
SampledFunction reflected_heat_on_gauss(const StarGraphSpace& space,
                                        const GaussBump& phi, double s);

// Circle semigroup e^{t(A/2 dd + B d - C)} on cos(k .): rotation + decay.
SampledFunction circle_harmonic_semigroup(const CircleGrid& grid, int k,
                                          double A, double B, double C,
                                          double s);

// Convolution of a Gaussian bump with the closed-form kernel of
// e^{-t sqrt(-(1/2) Laplace)} on R^1 via Fourier quadrature:
//   (1/pi) int_0^inf width sqrt(2 pi) e^{-width^2 k^2/2} e^{-t k/sqrt(2)}
//          cos(k (x - center)) dk
SampledFunction cauchy_halfgroup_on_gauss(const EuclideanGrid& grid,
                                          const GaussBump& phi, double t);

}  // namespace chernoff
