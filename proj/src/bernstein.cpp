#include "chernoff/bernstein.hpp"

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"
#include "chernoff/subordinators.hpp"

namespace chernoff {

namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kTruncTol = 1e-13;

// -expm1(-x) = 1 - e^{-x}, accurate for small x
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

// upper cutoff S so that the declared tail mass beyond S is < tol
double density_upper_cutoff(const LevyDensity& d, double tol) {
  if (d.tail_rate > 0.0) {
    double S = 1.0;
    while (d.tail_c * std::exp(-d.tail_rate * S) / d.tail_rate > tol && S < 1e300)
      S *= 2.0;
    return S;
  }
  if (d.tail_power > 1.0) {
    // int_S^inf c s^{-q} ds = c S^{1-q}/(q-1)
    double S = std::pow(d.tail_c / ((d.tail_power - 1.0) * tol),
                        1.0 / (d.tail_power - 1.0));
    return std::max(S, 2.0);
  }
  throw ValidationError("LevyDensity: tail behavior not declared");
}

// lower cutoff eps so that int_0^eps s rho(s) ds < tol (the integrand of
// eval_bernstein is <= z s rho(s) near zero)
double density_lower_cutoff(const LevyDensity& d, double tol) {
  // int_0^eps c0 s^{1-alpha0} ds = c0 eps^{2-alpha0} / (2-alpha0)
  double e = std::pow(tol * (2.0 - d.alpha0) / std::max(d.c0, 1e-300),
                      1.0 / (2.0 - d.alpha0));
  return std::min(e, 0.5);
}

}  // namespace

LevyMeasure LevyMeasure::zero() {
  LevyMeasure mu;
  mu.bounded = true;
  mu.total_mass = 0.0;
  mu.frac_moment_bound = 0.0;
  return mu;
}

LevyMeasure LevyMeasure::from_atoms(std::vector<LevyAtom> atoms) {
  LevyMeasure mu;
  mu.atoms = std::move(atoms);
  mu.bounded = true;
  mu.total_mass = 0.0;
  mu.frac_moment_bound = 0.0;
  for (const auto& a : mu.atoms) {
    mu.total_mass += a.mass;
    mu.frac_moment_bound += a.mass;  // s/(1+s) < 1
  }
  return mu;
}

LevyMeasure LevyMeasure::from_density(LevyDensity density, bool bounded,
                                      double total_mass,
                                      double frac_moment_bound) {
  LevyMeasure mu;
  mu.density = std::move(density);
  mu.bounded = bounded;
  mu.total_mass =
      bounded ? total_mass : std::numeric_limits<double>::infinity();
  mu.frac_moment_bound = frac_moment_bound;
  return mu;
}

void validate_levy_measure(const LevyMeasure& mu) {
  for (const auto& a : mu.atoms) {
    if (!(a.location > 0.0))
      throw ValidationError("LevyMeasure: atom location must be > 0");
    if (!(a.mass > 0.0))
      throw ValidationError("LevyMeasure: atom mass must be > 0");
  }
  if (mu.bounded && !std::isfinite(mu.total_mass))
    throw ValidationError("LevyMeasure: bounded flag set but total_mass not finite");
  if (!mu.bounded && std::isfinite(mu.total_mass))
    throw ValidationError("LevyMeasure: unbounded flag set but total_mass finite");
  if (mu.density) {
    const LevyDensity& d = *mu.density;
    if (d.alpha0 >= 2.0)
      throw ValidationError("LevyDensity: alpha0 must be < 2 for integrability");
    // numeric check of int s/(1+s) rho(s) ds against the declared bound
    const double S = density_upper_cutoff(d, kTruncTol);
    const double eps = density_lower_cutoff(d, kTruncTol);
    auto frac = [&](double u) {
      double s = std::exp(u);
      return s / (1.0 + s) * d.rho(s) * s;  // d(s) = e^u du
    };
    QuadResult q = integrate_adaptive(frac, std::log(eps), std::log(S), 1e-8);
    if (q.value > mu.frac_moment_bound * (1.0 + 1e-6) + 1e-12)
      throw ValidationError(
          "LevyMeasure: int s/(1+s) mu(ds) exceeds the declared bound");
  }
}

void validate_triplet(const BernsteinTriplet& triplet) {
  if (!(triplet.sigma >= 0.0))
    throw ValidationError("BernsteinTriplet: sigma must be >= 0");
  if (!(triplet.lambda >= 0.0))
    throw ValidationError("BernsteinTriplet: lambda must be >= 0");
  validate_levy_measure(triplet.mu);
}

double eval_bernstein(const BernsteinTriplet& triplet, double z) {
  if (!(z >= 0.0)) throw ValidationError("eval_bernstein: z must be >= 0");
  double f = triplet.sigma + triplet.lambda * z;
  for (const auto& a : triplet.mu.atoms)
    f += a.mass * one_minus_exp_neg(a.location * z);
  if (triplet.mu.density && z > 0.0) {
    const LevyDensity& d = *triplet.mu.density;
    const double eps = density_lower_cutoff(d, kTruncTol / std::max(z, 1.0));
    // (0,1]: s = w^p tames the s^{-alpha0} singularity
    const int p = std::max(1, (int)std::ceil(2.0 / (2.0 - d.alpha0)));
    auto low = [&](double w) {
      double s = std::pow(w, p);
      return one_minus_exp_neg(s * z) * d.rho(s) * p * std::pow(w, p - 1);
    };
    QuadResult ql = integrate_adaptive(low, std::pow(eps, 1.0 / p), 1.0, kQuadTol);
    // [1,S]: s = e^u
    const double S = density_upper_cutoff(d, kTruncTol);
    auto high = [&](double u) {
      double s = std::exp(u);
      return one_minus_exp_neg(s * z) * d.rho(s) * s;
    };
    QuadResult qh = integrate_adaptive(high, 0.0, std::log(S), kQuadTol);
    const double est = ql.error_estimate + qh.error_estimate;
    if (est > 1e-8)
      throw NumericError("eval_bernstein: density quadrature did not converge",
                         est);
    f += ql.value + qh.value;
  }
  return f;
}

double laplace_residual(const SubordinatorLaw& law,
                        const BernsteinTriplet& triplet, double t, double x) {
  if (!(t > 0.0)) throw ValidationError("laplace_residual: t must be > 0");
  if (!(x >= 0.0)) throw ValidationError("laplace_residual: x must be >= 0");
  const double lhs = law_laplace(law, t, x);
  const double rhs = std::exp(-t * eval_bernstein(triplet, x));
  return std::abs(lhs - rhs);
}

void validate_coefficient_field(const CoefficientField& field,
                                std::size_t n_nodes) {
  if (!(field.lambda_min > 0.0))
    throw ValidationError("CoefficientField: lambda_min must be > 0");
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double lam = field.lambda_at(i);
    const double sig = field.sigma_at(i);
    if (!(lam >= field.lambda_min && lam <= field.lambda_max))
      throw ValidationError("CoefficientField: lambda outside declared bounds");
    if (!(sig >= field.sigma_min))
      throw ValidationError("CoefficientField: sigma below declared bound");
  }
}

BernsteinTriplet triplet_stable_half(double scale) {
  const double c = scale / (2.0 * std::sqrt(M_PI));
  LevyDensity d;
  d.rho = [c](double s) { return c * std::pow(s, -1.5); };
  d.alpha0 = 1.5;
  d.c0 = c;
  d.tail_rate = 0.0;
  d.tail_power = 1.5;
  d.tail_c = c;
  d.name = "stable-1/2";
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_density(std::move(d), /*bounded=*/false,
                                    std::numeric_limits<double>::infinity(),
                                    /*frac_moment_bound=*/scale);
  return tr;
}

BernsteinTriplet triplet_gamma(double rate) {
  LevyDensity d;
  d.rho = [rate](double s) { return std::exp(-rate * s) / s; };
  d.alpha0 = 1.0;
  d.c0 = 1.0;
  d.tail_rate = rate;
  d.tail_c = 1.0;
  d.name = "gamma";
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_density(std::move(d), /*bounded=*/false,
                                    std::numeric_limits<double>::infinity(),
                                    /*frac_moment_bound=*/2.0 / rate + 2.0);
  return tr;
}

BernsteinTriplet triplet_inverse_gaussian(double delta, double gamma) {
  const double c = delta / std::sqrt(2.0 * M_PI);
  LevyDensity d;
  d.rho = [c, gamma](double s) {
    return c * std::pow(s, -1.5) * std::exp(-0.5 * gamma * gamma * s);
  };
  d.alpha0 = 1.5;
  d.c0 = c;
  if (gamma > 0.0) {
    d.tail_rate = 0.5 * gamma * gamma;
    d.tail_c = c;
  } else {
    d.tail_rate = 0.0;
    d.tail_power = 1.5;
    d.tail_c = c;
  }
  d.name = "inverse-gaussian";
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_density(std::move(d), /*bounded=*/false,
                                    std::numeric_limits<double>::infinity(),
                                    /*frac_moment_bound=*/2.0 * delta + 1.0);
  return tr;
}

}  // namespace chernoff
