#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "chernoff/bernstein.hpp"
#include "chernoff/rng.hpp"

namespace chernoff {

// Concrete laws eta^0_t (no killing: total mass 1 for every t > 0).
//
// StableHalf(scale):       density (ct/(2 sqrt(pi))) s^{-3/2} e^{-(ct)^2/(4s)},
//                          Laplace exponent f(z) = c sqrt(z), c = scale.
// GammaLaw(rate):          density rate^t s^{t-1} e^{-rate s}/Gamma(t),
//                          f(z) = log(1 + z/rate).
// InverseGaussian(delta,gamma): density (a/sqrt(2 pi)) e^{ab} s^{-3/2}
//                          e^{-a^2/(2s) - b^2 s/2}, a = delta t, b = gamma,
//                          f(z) = delta (sqrt(2z + gamma^2) - gamma).
// CompoundPoisson(mu):     eta^0_t = e^{-t mu(R)} sum_k t^k mu^{*k} / k!,
//                          requires bounded mu.
struct StableHalf {
  double scale = 1.0;
};
struct GammaLaw {
  double rate = 1.0;
};
struct InverseGaussian {
  double delta = 1.0;
  double gamma = 1.0;
};
struct CompoundPoisson {
  LevyMeasure mu;  // must be bounded
  // grid step used to discretize the density part of mu (atoms stay exact)
  double density_step = 1e-2;
};

struct SubordinatorLaw {
  std::variant<StableHalf, GammaLaw, InverseGaussian, CompoundPoisson> kind;
  std::string name;  // preset name

  bool has_density() const {
    return !std::holds_alternative<CompoundPoisson>(kind);
  }
  bool is_atomic() const { return !has_density(); }

  static SubordinatorLaw stable_half(double scale);
  static SubordinatorLaw gamma(double rate);
  static SubordinatorLaw inverse_gaussian(double delta, double gamma);
  static SubordinatorLaw compound_poisson(LevyMeasure mu,
                                          double density_step = 1e-2);
};

// Density of eta^0_t at s (laws with a density only). Throws on s <= 0.
double density_at(const SubordinatorLaw& law, double t, double s);

// Atom list of eta^0_t for CompoundPoisson, truncated so the remaining
// Poisson-series mass is < trunc_tol. Locations are nondecreasing, first is 0.
struct AtomList {
  std::vector<double> locations;
  std::vector<double> masses;
  double truncation_mass = 0.0;
};
AtomList atoms_at(const SubordinatorLaw& law, double t,
                  double trunc_tol = 1e-12);

// Discretization of int g(s) eta^0_t(ds). Nodes strictly increasing, in
// [0, inf) (location 0 appears only for CompoundPoisson). Weights nonnegative
// and summing to 1 up to the recorded tail bound (density laws renormalize the
// truncation away: eta^0 is a probability law when sigma = 0).
struct PositiveQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  double tail_mass_bound = 0.0;
};

PositiveQuadrature build_quadrature(const SubordinatorLaw& law, double t,
                                    int n_nodes, double tail_tol = 1e-10);

// One draw from eta^0_t. Density laws: inverse-CDF bisection on a fine
// quadrature CDF. CompoundPoisson: Poisson count plus exact jump sampling.
double sample(const SubordinatorLaw& law, double t, Rng& rng);

// int e^{-x s} eta^0_t(ds) by adaptive quadrature (atom sum for CP).
double law_laplace(const SubordinatorLaw& law, double t, double x);

// The matching Bernstein triplet for a shipped law (used for config presets
// and the Laplace consistency suite).
BernsteinTriplet matching_triplet(const SubordinatorLaw& law);

}  // namespace chernoff
