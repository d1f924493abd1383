#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "chernoff/engine.hpp"
#include "chernoff/euclidean_diffusion.hpp"
#include "chernoff/sampled.hpp"

namespace chernoff::testing {

// Brute-force midpoint Riemann sum; the standing independent oracle for
// one-dimensional integrals in this suite.
inline double riemann(const std::function<double(double)>& f, double a,
                      double b, long long n) {
  double sum = 0.0;
  const double h = (b - a) / n;
  for (long long i = 0; i < n; ++i) sum += f(a + (i + 0.5) * h);
  return sum * h;
}

inline ChernoffStep make_diffusion_chernoff_step(
    std::shared_ptr<DiffusionStep> step) {
  ChernoffStep cs;
  cs.dim = step->grid().size();
  cs.exact_semigroup = step->exact_semigroup();
  cs.apply = [step](double t, const SampledFunction& phi) {
    return step->apply(t, phi);
  };
  cs.apply_rowwise = [step](const std::vector<double>& times,
                            const SampledFunction& phi) {
    return step->apply_rowwise(times, phi);
  };
  cs.name = "diffusion";
  return cs;
}

inline ChernoffStep make_identity_step(std::size_t dim) {
  ChernoffStep cs;
  cs.dim = dim;
  cs.exact_semigroup = true;
  cs.apply = [](double, const SampledFunction& phi) { return phi; };
  cs.name = "identity";
  return cs;
}

}  // namespace chernoff::testing
