#include "chernoff/manifold_circle.hpp"

#include <omp.h>

#include <cmath>

#include "chernoff/errors.hpp"

namespace chernoff {

CircleGrid CircleGrid::make(int nodes) {
  if (nodes < 16) throw ValidationError("CircleGrid: need at least 16 nodes");
  return CircleGrid{nodes};
}

SampledFunction CircleGrid::sample(
    const std::function<double(double)>& f) const {
  SampledFunction out;
  out.values.resize(size());
  for (std::size_t j = 0; j < size(); ++j) out.values[j] = f(theta(j));
  return out;
}

double k1(double t, double x, double y) {
  if (!(t > 0.0)) throw ValidationError("k1: t must be > 0");
  double d = std::abs(x - y);
  d = std::fmod(d, 2.0 * M_PI);
  const double arc = std::min(d, 2.0 * M_PI - d);
  return std::exp(-arc * arc / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

double k3(double t, double x, double y) {
  if (!(t > 0.0)) throw ValidationError("k3: t must be > 0");
  const double ch2 = 2.0 - 2.0 * std::cos(x - y);
  return std::exp(-ch2 / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

namespace {

double kernel_at(CircleKernel kernel, double t, double x, double y) {
  return kernel == CircleKernel::k1_geodesic ? k1(t, x, y) : k3(t, x, y);
}

}  // namespace

double normalized_step_at(CircleKernel kernel, const CircleGrid& grid,
                          double t, const SampledFunction& phi, double x) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = kernel_at(kernel, t, x, grid.theta(j));
    num += k * phi.values[j];
    den += k;
  }
  return num / den;  // the volume weight cancels in the ratio
}

double normalization_denominator(CircleKernel kernel, const CircleGrid& grid,
                                 double t, double x) {
  double den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    den += kernel_at(kernel, t, x, grid.theta(j));
  return den * grid.weight();
}

SampledFunction normalized_step(CircleKernel kernel, const CircleGrid& grid,
                                double t, const SampledFunction& phi) {
  if (phi.values.size() != grid.size())
    throw ValidationError("normalized_step: phi not sampled on this grid");
  if (t == 0.0) return phi;
  if (!(t > 0.0)) throw ValidationError("normalized_step: t must be >= 0");
  SampledFunction out;
  out.values.resize(grid.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)grid.size(); ++i)
    out.values[i] = normalized_step_at(kernel, grid, t, phi, grid.theta(i));
  out.diag.max_row_mass = 1.0;  // exact by normalization
  return out;
}

SampledFunction hat_step(CircleKernel kernel, const CircleGrid& grid,
                         const CircleCoefficients& coeffs, double t,
                         const SampledFunction& phi) {
  if (phi.values.size() != grid.size())
    throw ValidationError("hat_step: phi not sampled on this grid");
  if (t == 0.0) return phi;
  if (!(t > 0.0)) throw ValidationError("hat_step: t must be >= 0");
  const std::size_t n = grid.size();
  std::vector<double> xs(n), tau(n), kill(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.theta(i);
    xs[i] = x + t * coeffs.B(x);  // geodesic flow on S^1
    const double a = coeffs.A(std::fmod(xs[i] + 4.0 * M_PI, 2.0 * M_PI));
    if (!(a > 0.0)) throw ValidationError("hat_step: A must be > 0");
    tau[i] = a * t;
    kill[i] = std::exp(-t * coeffs.C(x));
  }
  SampledFunction out;
  out.values.resize(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i)
    out.values[i] =
        kill[i] * normalized_step_at(kernel, grid, tau[i], phi, xs[i]);
  return out;
}

}  // namespace chernoff
