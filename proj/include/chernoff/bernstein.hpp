#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chernoff {

struct SubordinatorLaw;  // subordinators.hpp

// Density part of a Levy measure on (0,inf), with the tail behavior declared
// up front so quadrature windows can be chosen analytically.
//
//   rho(s) ~ c0 * s^{-alpha0}        as s -> 0+   (alpha0 < 2)
//   rho(s) <= tail_c * e^{-tail_rate s}           if tail_rate > 0
//   rho(s) <= tail_c * s^{-tail_power}            otherwise (tail_power > 1)
struct LevyDensity {
  std::function<double(double)> rho;
  double alpha0 = 0.0;
  double c0 = 0.0;
  double tail_rate = 0.0;   // exponential tail rate (0 = power tail)
  double tail_power = 0.0;  // power tail exponent (> 1), used when tail_rate == 0
  double tail_c = 1.0;
  std::string name;  // preset name for configs/manifests
};

struct LevyAtom {
  double location;  // > 0
  double mass;      // > 0
};

// mu in the triplet representation: atoms plus an optional density.
// `bounded` is an explicit flag, never inferred numerically: the bounded-Levy
// construction branches on it and misclassification must be impossible.
struct LevyMeasure {
  std::vector<LevyAtom> atoms;
  std::optional<LevyDensity> density;
  bool bounded = true;
  double total_mass = 0.0;  // finite iff bounded; +inf otherwise
  // declared bound on int s/(1+s) mu(ds); checked numerically on the density
  double frac_moment_bound = std::numeric_limits<double>::infinity();

  bool is_zero() const { return atoms.empty() && !density.has_value(); }

  static LevyMeasure zero();
  static LevyMeasure from_atoms(std::vector<LevyAtom> atoms);
  static LevyMeasure from_density(LevyDensity density, bool bounded,
                                  double total_mass, double frac_moment_bound);
};

// Validates the invariants (atom positivity, s/(1+s) integrability against the
// declared bound, bounded <-> finite total mass). Throws ValidationError.
void validate_levy_measure(const LevyMeasure& mu);

struct BernsteinTriplet {
  double sigma = 0.0;   // killing
  double lambda = 0.0;  // drift
  LevyMeasure mu;
};

void validate_triplet(const BernsteinTriplet& triplet);

// f(z) = sigma + lambda z + sum_i m_i (1 - e^{-s_i z}) + int (1-e^{-sz}) rho(s) ds
// Density quadrature: split at s=1, power substitution s = w^p below, s = e^u
// above, adaptive Gauss-Legendre to 1e-10. Throws NumericError on
// non-convergence (residual attached).
double eval_bernstein(const BernsteinTriplet& triplet, double z);

// | L[eta_t](x) - e^{-t f(x)} | for a (law, triplet) pair that claims to match.
double laplace_residual(const SubordinatorLaw& law,
                        const BernsteinTriplet& triplet, double t, double x);

// Variable sigma/lambda fields (values sampled on the state space) with their
// declared bounds; lambda must stay strictly positive.
struct CoefficientField {
  std::function<double(std::size_t)> sigma_at;   // by node index
  std::function<double(std::size_t)> lambda_at;  // by node index
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double sigma_min = 0.0;
};

void validate_coefficient_field(const CoefficientField& field, std::size_t n_nodes);

// Shipped triplet presets matching the shipped subordinator laws.
BernsteinTriplet triplet_stable_half(double scale);       // f(z) = scale sqrt(z)
BernsteinTriplet triplet_gamma(double rate);              // f(z) = log(1 + z/rate)
BernsteinTriplet triplet_inverse_gaussian(double delta, double gamma);
                                                          // f(z) = delta(sqrt(2z+gamma^2)-gamma)

}  // namespace chernoff
