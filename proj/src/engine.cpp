#include "chernoff/engine.hpp"

#include <algorithm>
#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"
#include "chernoff/rng.hpp"

namespace chernoff {

namespace {

void check_dim(const ChernoffStep& step, const SampledFunction& phi) {
  if (step.dim != 0 && phi.values.size() != step.dim)
    throw ValidationError("engine: phi dimension does not match the step");
}

void axpy(SampledFunction& acc, double w, const SampledFunction& u) {
  for (std::size_t i = 0; i < acc.values.size(); ++i)
    acc.values[i] += w * u.values[i];
  acc.diag.merge(u.diag);
}

}  // namespace

MSchedule MSchedule::parse(const std::string& s) {
  MSchedule m;
  if (s == "floor-inverse") {
    m.kind = Kind::floor_inverse;
  } else if (s == "floor-inverse-unclamped") {
    m.kind = Kind::floor_inverse_unclamped;
  } else if (s.rfind("const:", 0) == 0) {
    m.kind = Kind::constant;
    m.k = std::stoi(s.substr(6));
    if (m.k < 1) throw ValidationError("schedule const:k needs k >= 1");
  } else {
    throw ValidationError("unknown m-schedule: " + s);
  }
  return m;
}

std::string MSchedule::str() const {
  switch (kind) {
    case Kind::floor_inverse: return "floor-inverse";
    case Kind::floor_inverse_unclamped: return "floor-inverse-unclamped";
    default: return "const:" + std::to_string(k);
  }
}

int m_default(double t) {
  if (!(t > 0.0)) throw ValidationError("m_default: t must be > 0");
  return std::max(1, (int)std::floor(1.0 / t));
}

int schedule_m(const MSchedule& schedule, double t) {
  switch (schedule.kind) {
    case MSchedule::Kind::floor_inverse: return m_default(t);
    case MSchedule::Kind::floor_inverse_unclamped:
      return std::max(0, (int)std::floor(1.0 / t));
    default: return schedule.k;
  }
}

SubordinationConfig make_subordination_config(BernsteinTriplet triplet,
                                              SubordinatorLaw law,
                                              MSchedule schedule, int eta_nodes,
                                              double tail_tol) {
  validate_triplet(triplet);
  if (eta_nodes < 4)
    throw ValidationError("SubordinationConfig: eta_nodes >= 4");
  SubordinationConfig cfg;
  cfg.triplet = std::move(triplet);
  cfg.law = std::move(law);
  cfg.schedule = schedule;
  cfg.eta_nodes = eta_nodes;
  cfg.tail_tol = tail_tol;
  // the law must describe eta^0, i.e. the (0,0,mu) part of the triplet
  if (!cfg.triplet.mu.is_zero()) {
    BernsteinTriplet f0;
    f0.mu = cfg.triplet.mu;
    const double r = laplace_residual(cfg.law, f0, 1.0, 1.0);
    if (r > 1e-5)
      throw ValidationError(
          "SubordinationConfig: law does not match mu (laplace residual " +
          std::to_string(r) + ")");
  }
  return cfg;
}

SampledFunction power_apply(const ChernoffStep& step, double s, int m,
                            const SampledFunction& phi) {
  if (m < 0) throw ValidationError("power_apply: m must be >= 0");
  check_dim(step, phi);
  if (m == 0 || s == 0.0) return phi;
  SampledFunction u = phi;
  const double tau = s / m;
  for (int i = 0; i < m; ++i) u = step.apply(tau, u);
  return u;
}

SampledFunction f0_step(const SubordinationConfig& config,
                        const ChernoffStep& step, double t,
                        const SampledFunction& phi) {
  check_dim(step, phi);
  if (t == 0.0 || config.triplet.mu.is_zero()) return phi;  // eta^0_t = delta_0
  if (!(t > 0.0)) throw ValidationError("f0_step: t must be >= 0");
  if (config.law.is_atomic() && !config.allow_atomic_eta)
    throw ValidationError(
        "f0_step: atomic eta^0 law requires allow_atomic_eta (use the "
        "bounded-Levy family instead)");
  const PositiveQuadrature q =
      build_quadrature(config.law, t, config.eta_nodes, config.tail_tol);
  const int m = schedule_m(config.schedule, t);
  const bool collapse = config.collapse_exact && step.exact_semigroup;
  SampledFunction acc;
  acc.values.assign(phi.values.size(), 0.0);
  // node order fixed; the reduction is ordered and deterministic
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double s = q.nodes[i];
    SampledFunction u = collapse ? (s == 0.0 ? phi : step.apply(s, phi))
                                 : power_apply(step, s, m, phi);
    axpy(acc, q.weights[i], u);
  }
  return acc;
}

SampledFunction subordinate_step(const SubordinationConfig& config,
                                 const ChernoffStep& step, double t,
                                 const SampledFunction& phi) {
  if (t == 0.0) return phi;
  SampledFunction u = f0_step(config, step, t, phi);
  const double lt = config.triplet.lambda * t;
  if (lt > 0.0) u = step.apply(lt, u);
  if (config.triplet.sigma > 0.0) {
    const double kill = std::exp(-config.triplet.sigma * t);
    for (auto& v : u.values) v *= kill;
  }
  return u;
}

SampledFunction bounded_levy_step(const SubordinationConfig& config,
                                  const ChernoffStep& step, double t,
                                  const SampledFunction& phi) {
  check_dim(step, phi);
  if (!config.triplet.mu.bounded)
    throw ValidationError("bounded_levy_step: mu must be bounded");
  if (t == 0.0) return phi;
  if (!(t > 0.0)) throw ValidationError("bounded_levy_step: t must be >= 0");
  const int m = schedule_m(config.schedule, t);
  const bool collapse = config.collapse_exact && step.exact_semigroup;
  SampledFunction inner = phi;
  if (!config.triplet.mu.is_zero()) {
    const PositiveQuadrature q = bounded_measure_quadrature(config.triplet.mu);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double s = q.nodes[i];
      SampledFunction u = collapse ? (s == 0.0 ? phi : step.apply(s, phi))
                                   : power_apply(step, s, m, phi);
      for (std::size_t k = 0; k < inner.values.size(); ++k)
        inner.values[k] += t * q.weights[i] * (u.values[k] - phi.values[k]);
      inner.diag.merge(u.diag);
    }
  }
  const double lt = config.triplet.lambda * t;
  if (lt > 0.0) inner = step.apply(lt, inner);
  if (config.triplet.sigma > 0.0) {
    const double kill = std::exp(-config.triplet.sigma * t);
    for (auto& v : inner.values) v *= kill;
  }
  return inner;
}

SampledFunction variable_coeff_step(const CoefficientField& fields,
                                    const SubordinationConfig& config,
                                    const ChernoffStep& step, double t,
                                    const SampledFunction& phi) {
  check_dim(step, phi);
  if (!step.apply_rowwise)
    throw ValidationError(
        "variable_coeff_step: the base step does not support row-wise times");
  validate_coefficient_field(fields, phi.values.size());
  if (t == 0.0) return phi;
  SampledFunction u = f0_step(config, step, t, phi);
  std::vector<double> times(phi.values.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    times[i] = fields.lambda_at(i) * t;
  u = step.apply_rowwise(times, u);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] *= std::exp(-fields.sigma_at(i) * t);
  return u;
}

SampledFunction generator_probe(
    const std::function<SampledFunction(double, const SampledFunction&)>& step,
    const SampledFunction& phi, double t) {
  if (!(t > 0.0)) throw ValidationError("generator_probe: t must be > 0");
  SampledFunction u = step(t, phi);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = (u.values[i] - phi.values[i]) / t;
  return u;
}

IterateResult chernoff_iterate(
    const std::function<SampledFunction(double, const SampledFunction&)>& family,
    const SubordinationConfig& config, std::size_t dim, double t, int n,
    const SampledFunction& phi) {
  if (n < 1) throw ValidationError("chernoff_iterate: n must be >= 1");
  if (!(t > 0.0)) throw ValidationError("chernoff_iterate: t must be > 0");
  IterateResult out;
  const double tn = t / n;
  const int m = schedule_m(config.schedule, tn);
  out.estimated_work = (double)n * config.eta_nodes *
                       std::max(1, m) * (double)dim * (double)dim;
  if (out.estimated_work > config.budget)
    throw BudgetError("chernoff_iterate: estimated work exceeds budget",
                      out.estimated_work, config.budget);
  SampledFunction u = phi;
  for (int level = 0; level < n; ++level) {
    u = family(tn, u);
    out.level_sup_norms.push_back(u.sup_norm());
  }
  out.value = std::move(u);
  return out;
}

SampledFunction subordinate_oracle_exact(
    const SubordinatorLaw& law,
    const std::function<SampledFunction(double)>& exact_semigroup_of_phi,
    double t, int nodes) {
  if (!(t > 0.0))
    throw ValidationError("subordinate_oracle_exact: t must be > 0");
  const PositiveQuadrature q = build_quadrature(law, t, nodes, 1e-13);
  SampledFunction acc;
  bool first = true;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    SampledFunction u = exact_semigroup_of_phi(q.nodes[i]);
    if (first) {
      acc.values.assign(u.values.size(), 0.0);
      first = false;
    }
    axpy(acc, q.weights[i], u);
  }
  return acc;
}

McOracleResult subordinate_oracle_mc(const SubordinationConfig& config,
                                     const ChernoffStep& step, double t,
                                     const SampledFunction& phi, int n_samples,
                                     std::uint64_t seed) {
  if (n_samples < 1000)
    throw ValidationError("subordinate_oracle_mc: n_samples >= 1000");
  const int m = schedule_m(config.schedule, t);
  const double work =
      (double)n_samples * std::max(1, m) * (double)phi.values.size() *
      (double)phi.values.size();
  if (work > config.budget)
    throw BudgetError("subordinate_oracle_mc: estimated work exceeds budget",
                      work, config.budget);
  Rng rng(seed);
  const std::size_t dim = phi.values.size();
  std::vector<double> mean(dim, 0.0), m2(dim, 0.0);
  const bool collapse = config.collapse_exact && step.exact_semigroup;
  for (int k = 1; k <= n_samples; ++k) {
    const double s = sample(config.law, t, rng);
    SampledFunction u = collapse ? (s == 0.0 ? phi : step.apply(s, phi))
                                 : power_apply(step, s, m, phi);
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = u.values[i] - mean[i];
      mean[i] += d / k;
      m2[i] += d * (u.values[i] - mean[i]);
    }
  }
  McOracleResult out;
  out.mean.values = std::move(mean);
  out.stderr_band.resize(dim);
  for (std::size_t i = 0; i < dim; ++i)
    out.stderr_band[i] =
        std::sqrt(m2[i] / ((double)n_samples - 1.0) / (double)n_samples);
  out.n_samples = n_samples;
  return out;
}

SampledFunction lf0_generator_oracle(
    const LevyMeasure& mu,
    const std::function<SampledFunction(double)>& exact_semigroup_of_phi,
    const SampledFunction& phi) {
  if (!mu.bounded)
    throw ValidationError("lf0_generator_oracle: mu must be bounded");
  SampledFunction acc;
  acc.values.assign(phi.values.size(), 0.0);
  if (mu.is_zero()) return acc;
  const PositiveQuadrature q = bounded_measure_quadrature(mu);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    SampledFunction u = exact_semigroup_of_phi(q.nodes[i]);
    for (std::size_t k = 0; k < acc.values.size(); ++k)
      acc.values[k] += q.weights[i] * (u.values[k] - phi.values[k]);
  }
  return acc;
}

PositiveQuadrature bounded_measure_quadrature(const LevyMeasure& mu,
                                              int n_nodes) {
  if (!mu.bounded)
    throw ValidationError("bounded_measure_quadrature: mu must be bounded");
  PositiveQuadrature q;
  for (const auto& a : mu.atoms) {
    q.nodes.push_back(a.location);
    q.weights.push_back(a.mass);
  }
  if (mu.density) {
    const LevyDensity& d = *mu.density;
    if (d.alpha0 >= 1.0)
      throw ValidationError(
          "bounded_measure_quadrature: density with alpha0 >= 1 cannot be a "
          "bounded measure");
    double S = 1.0;
    if (d.tail_rate > 0.0) {
      while (d.tail_c * std::exp(-d.tail_rate * S) / d.tail_rate > 1e-14)
        S *= 2.0;
    } else {
      S = std::pow(d.tail_c / ((d.tail_power - 1.0) * 1e-14),
                   1.0 / (d.tail_power - 1.0));
    }
    const double eps = std::pow(1e-14 * std::max(1.0 - d.alpha0, 0.1) /
                                    std::max(d.c0, 1e-300),
                                1.0 / (1.0 - d.alpha0));
    const int order = 8;
    const int panels = std::max(2, n_nodes / order);
    const GaussLegendre& gl = gauss_legendre(order);
    const double umin = std::log(std::min(eps, S * 0.5)), umax = std::log(S);
    for (int p = 0; p < panels; ++p) {
      const double a = umin + (umax - umin) * p / panels;
      const double b = umin + (umax - umin) * (p + 1) / panels;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
        const double s = std::exp(u);
        q.nodes.push_back(s);
        q.weights.push_back(0.5 * (b - a) * gl.weights[k] * d.rho(s) * s);
      }
    }
  }
  // sort by node, keep weights nonnegative
  std::vector<std::size_t> idx(q.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return q.nodes[a] < q.nodes[b]; });
  PositiveQuadrature out;
  for (std::size_t i : idx) {
    out.nodes.push_back(q.nodes[i]);
    out.weights.push_back(std::max(0.0, q.weights[i]));
  }
  return out;
}

}  // namespace chernoff
