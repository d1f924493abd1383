#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chernoff/bernstein.hpp"
#include "chernoff/sampled.hpp"
#include "chernoff/subordinators.hpp"

namespace chernoff {

// A Chernoff family: apply(0, phi) = phi and a sup-norm contraction up to
// quadrature slack. The state space lives inside the closure; the engine only
// needs the vector of node values.
struct ChernoffStep {
  std::function<SampledFunction(double, const SampledFunction&)> apply;
  // optional: row x evaluated at its own time (variable-lambda families)
  std::function<SampledFunction(const std::vector<double>&,
                                const SampledFunction&)>
      apply_rowwise;
  std::size_t dim = 0;
  bool contraction = true;
  // the family is exactly the target semigroup (constant-coefficient
  // diffusion); licenses the power collapse [F(s/m)]^m = F(s)
  bool exact_semigroup = false;
  std::string name;
};

struct MSchedule {
  enum class Kind { floor_inverse, floor_inverse_unclamped, constant };
  Kind kind = Kind::floor_inverse;
  int k = 1;  // for Kind::constant

  static MSchedule parse(const std::string& s);
  std::string str() const;
};

// m(t) = max(1, floor(1/t)); the footnote's floor(1/t) clamped away from 0.
int m_default(double t);
int schedule_m(const MSchedule& schedule, double t);

struct SubordinationConfig {
  BernsteinTriplet triplet;
  SubordinatorLaw law;  // law of eta^0 (the (0,0,mu) part)
  MSchedule schedule;
  int eta_nodes = 64;
  double tail_tol = 1e-10;
  // exploit the semigroup identity [F(s/m)]^m = F(s) for steps that declare
  // exactness; literal m-fold powers of wide kernels on a truncated grid lose
  // mass catastrophically, the collapse is both faster and more accurate
  bool collapse_exact = true;
  // atomic eta^0 laws (CompoundPoisson) are outside the strong-Feller
  // hypothesis of the F-family; permitted only when explicitly flagged
  bool allow_atomic_eta = false;
  double budget = 5e12;
};

// Builds and validates a config: triplet invariants, law<->mu consistency via
// laplace_residual (mismatched pairs are rejected), schedule sanity.
SubordinationConfig make_subordination_config(BernsteinTriplet triplet,
                                              SubordinatorLaw law,
                                              MSchedule schedule, int eta_nodes,
                                              double tail_tol = 1e-10);

// [F(s/m)]^m phi, literally. m = 0 is the identity (B^0 = Id convention).
SampledFunction power_apply(const ChernoffStep& step, double s, int m,
                            const SampledFunction& phi);

// F_0(t) phi = int [F(s/m(t))]^{m(t)} phi eta^0_t(ds); F_0(0) = Id.
SampledFunction f0_step(const SubordinationConfig& config,
                        const ChernoffStep& step, double t,
                        const SampledFunction& phi);

// F(t) phi = e^{-sigma t} F(lambda t) F_0(t) phi; F(0) = Id.
SampledFunction subordinate_step(const SubordinationConfig& config,
                                 const ChernoffStep& step, double t,
                                 const SampledFunction& phi);

// F_mu(t) phi = e^{-sigma t} F(lambda t)(phi + t int (F^{m}(s/m)phi - phi) mu(ds));
// requires bounded mu.
SampledFunction bounded_levy_step(const SubordinationConfig& config,
                                  const ChernoffStep& step, double t,
                                  const SampledFunction& phi);

// tilde F(t) phi = e^{-sigma(x) t} (F(lambda(x) t) F_0(t) phi)(x).
SampledFunction variable_coeff_step(const CoefficientField& fields,
                                    const SubordinationConfig& config,
                                    const ChernoffStep& step, double t,
                                    const SampledFunction& phi);

// (F(t)phi - phi)/t
SampledFunction generator_probe(
    const std::function<SampledFunction(double, const SampledFunction&)>& step,
    const SampledFunction& phi, double t);

struct IterateResult {
  SampledFunction value;
  std::vector<double> level_sup_norms;
  double estimated_work = 0.0;
};

// [family(t/n)]^n phi with per-level sup-norm diagnostics and a work guard
// n * eta_nodes * m(t/n) * dim^2 against config.budget.
IterateResult chernoff_iterate(
    const std::function<SampledFunction(double, const SampledFunction&)>& family,
    const SubordinationConfig& config, std::size_t dim, double t, int n,
    const SampledFunction& phi);

// T^f_t phi = int T_s phi eta_t(ds) for an exact semigroup s -> T_s phi given
// in closed form; the primary independent oracle.
SampledFunction subordinate_oracle_exact(
    const SubordinatorLaw& law,
    const std::function<SampledFunction(double)>& exact_semigroup_of_phi,
    double t, int nodes = 2048);

struct McOracleResult {
  SampledFunction mean;
  std::vector<double> stderr_band;  // pointwise standard error
  int n_samples = 0;
};

// Monte-Carlo secondary oracle: average of power-resolved step applications at
// sampled subordinator times. Deterministic for a fixed seed.
McOracleResult subordinate_oracle_mc(const SubordinationConfig& config,
                                     const ChernoffStep& step, double t,
                                     const SampledFunction& phi, int n_samples,
                                     std::uint64_t seed);

// L^{f_0} phi = int (T_s phi - phi) mu(ds) for bounded mu.
SampledFunction lf0_generator_oracle(
    const LevyMeasure& mu,
    const std::function<SampledFunction(double)>& exact_semigroup_of_phi,
    const SampledFunction& phi);

// Quadrature nodes/weights for a bounded Levy measure (atoms exact, density
// by log-grid Gauss-Legendre between the declared cutoffs).
PositiveQuadrature bounded_measure_quadrature(const LevyMeasure& mu,
                                              int n_nodes = 64);

}  // namespace chernoff
