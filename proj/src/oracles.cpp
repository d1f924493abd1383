#include "chernoff/oracles.hpp"

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"

namespace chernoff {

SampledFunction heat_on_gauss(const EuclideanGrid& grid, const GaussBump& phi,
                              double a, double b, double c, double s) {
  if (grid.dim != 1)
    throw ValidationError("heat_on_gauss: 1-d grids only");
  SampledFunction out;
  out.values.resize(grid.size());
  if (s == 0.0) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      out.values[i] = phi.eval(grid.coord((int)i));
    return out;
  }
  // e^{s a/2 dd} gauss(width) = width/sqrt(width^2 + a s) gauss(sqrt(width^2 + a s));
  // drift shifts the argument by s b, killing multiplies by e^{-s c}
  const double v = phi.width * phi.width + a * s;
  const double amp = phi.width / std::sqrt(v) * std::exp(-s * c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.coord((int)i) + s * b - phi.center;
    out.values[i] = amp * std::exp(-x * x / (2.0 * v));
  }
  return out;
}

SampledFunction reflected_heat_on_gauss(const StarGraphSpace& space,
                                        const GaussBump& phi, double s) {
  if (space.edges != 1)
    throw ValidationError("reflected_heat_on_gauss: single-edge graphs only");
  SampledFunction out;
  out.values.resize(space.size());
  auto value = [&](double x) {
    if (s == 0.0) return phi.eval(x);
    // int_0^inf g_s(x-y) e^{-(y-x0)^2/(2 w^2)} dy in closed form, plus the
    // reflected image x -> -x
    auto half = [&](double xx) {
      const double w2 = phi.width * phi.width;
      const double vstar = s * w2 / (s + w2);
      const double mustar = (xx * w2 + phi.center * s) / (s + w2);
      const double pref = phi.width / std::sqrt(s + w2);
      const double d = xx - phi.center;
      return pref * std::exp(-d * d / (2.0 * (s + w2))) * 0.5 *
             std::erfc(-mustar / std::sqrt(2.0 * vstar));
    };
    return half(x) + half(-x);
  };
  out.values[0] = value(0.0);
  for (int i = 1; i < space.edge_nodes; ++i)
    out.values[space.index(0, i)] = value(space.h * i);
  return out;
}

SampledFunction circle_harmonic_semigroup(const CircleGrid& grid, int k,
                                          double A, double B, double C,
                                          double s) {
  SampledFunction out;
  out.values.resize(grid.size());
  const double decay = std::exp(-s * (0.5 * A * k * k + C));
  for (std::size_t j = 0; j < grid.size(); ++j)
    out.values[j] = decay * std::cos(k * (grid.theta(j) + B * s));
  return out;
}

SampledFunction cauchy_halfgroup_on_gauss(const EuclideanGrid& grid,
                                          const GaussBump& phi, double t) {
  if (grid.dim != 1)
    throw ValidationError("cauchy_halfgroup_on_gauss: 1-d grids only");
  const double w = phi.width;
  // integrand decays like e^{-w^2 k^2/2}; resolve cos(k x) out to |x| = R
  const double kmax = 10.0 / w + 2.0;
  const int panels = std::max(64, (int)std::ceil(kmax * grid.extent / 4.0));
  const GaussLegendre& gl = gauss_legendre(12);
  SampledFunction out;
  out.values.assign(grid.size(), 0.0);
  for (int p = 0; p < panels; ++p) {
    const double a = kmax * p / panels, b = kmax * (p + 1) / panels;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double kq = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
      const double f = w * std::sqrt(2.0 * M_PI) *
                       std::exp(-0.5 * w * w * kq * kq) *
                       std::exp(-t * kq / std::sqrt(2.0)) * 0.5 * (b - a) *
                       gl.weights[q];
      for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] += f * std::cos(kq * (grid.coord((int)i) - phi.center));
    }
  }
  for (auto& v : out.values) v /= M_PI;
  return out;
}

}  // namespace chernoff
