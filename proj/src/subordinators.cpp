#include "chernoff/subordinators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"

namespace chernoff {

namespace {

double sq(double x) { return x * x; }

// ---- stable-1/2 ------------------------------------------------------------
// With tau = scale * t the density is (tau/(2 sqrt(pi))) s^{-3/2} e^{-tau^2/4s}.
// The exact substitution v = tau/(2 sqrt(s)) turns the law into the half-
// Gaussian weight (2/sqrt(pi)) e^{-v^2} dv; panels: log-graded on [vlo, 0.5]
// (resolves integrand structure at v ~ tau-scale), linear on [0.5, vmax].
struct StablePanels {
  std::vector<double> bounds;
};

StablePanels stable_panels(double tau, int panels, double vmax) {
  StablePanels p;
  const int nlin = std::max(std::min(3, panels - 1), 3 * panels / 8);
  const int nlog = panels - nlin;
  const double vsplit = 0.5;
  const double vlo = std::min(1e-4, tau * 1e-4);
  for (int i = 0; i <= nlog; ++i)
    p.bounds.push_back(
        std::exp(std::log(vlo) + (std::log(vsplit) - std::log(vlo)) * i / nlog));
  for (int i = 1; i <= nlin; ++i)
    p.bounds.push_back(vsplit + (vmax - vsplit) * i / nlin);
  return p;
}

PositiveQuadrature build_quad_stable(double tau, int n_nodes, double tail_tol) {
  const int order = 8;
  const int panels = std::max(2, n_nodes / order);
  // truncation: mass above v (i.e. below s) is erfc(v); mass below vlo ~ 2vlo/sqrt(pi)
  double vmax = 4.0;
  while (std::erfc(vmax) > 0.5 * tail_tol && vmax < 12.0) vmax += 0.5;
  StablePanels sp = stable_panels(tau, panels, vmax);
  const GaussLegendre& gl = gauss_legendre(order);
  PositiveQuadrature q;
  for (std::size_t p = 0; p + 1 < sp.bounds.size(); ++p) {
    const double a = sp.bounds[p], b = sp.bounds[p + 1];
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
      q.nodes.push_back(tau * tau / (4.0 * v * v));
      q.weights.push_back(0.5 * (b - a) * gl.weights[k] * 2.0 / std::sqrt(M_PI) *
                          std::exp(-v * v));
    }
  }
  q.tail_mass_bound = std::erfc(vmax) + 2.0 * sp.bounds[0] / std::sqrt(M_PI);
  return q;
}

// ---- gamma -----------------------------------------------------------------
// Shape t, rate r. For t <= 1 substitute w = (r s)^t: the weight becomes
// e^{-w^{1/t}} dw / (t Gamma(t)) on [0, W]. For t > 1 use u = log s.
double gamma_upper_cutoff(double t, double rate, double tol) {
  double S = std::max(4.0 * t / rate, 1.0);
  // Chernoff bound with theta = rate/2: P(X > S) <= 2^t e^{-rate S / 2}
  while (std::pow(2.0, t) * std::exp(-0.5 * rate * S) > tol && S < 1e300)
    S *= 2.0;
  return S;
}

PositiveQuadrature build_quad_gamma(double t, double rate, int n_nodes,
                                    double tail_tol) {
  const int order = 8;
  const int panels = std::max(2, n_nodes / order);
  const GaussLegendre& gl = gauss_legendre(order);
  const double lg = std::lgamma(t);
  PositiveQuadrature q;
  const double S = gamma_upper_cutoff(t, rate, 0.5 * tail_tol);
  if (t <= 1.0) {
    const double W = std::pow(rate * S, t);
    std::vector<double> bounds;
    const double split = 1.0 - 5.0 * t;  // e^{-w^{1/t}} ~ indicator of [0,1]
    if (split > 0.1 && W > 1.0) {
      const int half = panels / 2;
      for (int i = 0; i <= half; ++i) bounds.push_back(split * i / half);
      for (int i = 1; i <= panels - half; ++i)
        bounds.push_back(split + (W - split) * i / (panels - half));
    } else {
      // quadratic grading packs panels where the exponential mass sits
      for (int i = 0; i <= panels; ++i) {
        const double f = (double)i / panels;
        bounds.push_back(W * f * f);
      }
    }
    for (int p = 0; p < panels; ++p) {
      const double a = bounds[p], b = bounds[p + 1];
      if (!(b > a)) continue;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double w = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
        if (w <= 0.0) continue;
        const double s = std::pow(w, 1.0 / t) / rate;
        q.nodes.push_back(s);
        q.weights.push_back(0.5 * (b - a) * gl.weights[k] *
                            std::exp(-std::pow(w, 1.0 / t) - lg) / t);
      }
    }
  } else {
    const double d = std::pow(tail_tol * std::exp(std::lgamma(t + 1.0)), 1.0 / t) / rate;
    const double umin = std::log(d), umax = std::log(S);
    for (int p = 0; p < panels; ++p) {
      const double a = umin + (umax - umin) * p / panels;
      const double b = umin + (umax - umin) * (p + 1) / panels;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
        const double s = std::exp(u);
        const double logdens =
            t * std::log(rate) + (t - 1.0) * std::log(s) - rate * s - lg;
        q.nodes.push_back(s);
        q.weights.push_back(0.5 * (b - a) * gl.weights[k] *
                            std::exp(logdens) * s);
      }
    }
  }
  q.tail_mass_bound = tail_tol;
  return q;
}

// ---- inverse Gaussian --------------------------------------------------------
// a = delta t, b = gamma; log-grid between analytic cutoffs. (b = 0 routes to
// the stable builder: identical law with tau = sqrt(2) a.)
PositiveQuadrature build_quad_ig(double a, double b, int n_nodes,
                                 double tail_tol) {
  const int order = 8;
  const int panels = std::max(2, n_nodes / order);
  const GaussLegendre& gl = gauss_legendre(order);
  // mass below d: erfc(a / sqrt(2 d)) e^{ab} as a bound
  double d = sq(a) / 2.0;
  while (std::erfc(a / std::sqrt(2.0 * d)) * std::exp(a * b) > 0.5 * tail_tol &&
         d > 1e-280)
    d *= 0.5;
  // mass above S: (a/sqrt(2 pi)) e^{ab} e^{-b^2 S/2} 2/sqrt(S)
  double S = std::max(4.0 * a / std::max(b, 1e-8), 1.0);
  while (a / std::sqrt(2.0 * M_PI) * std::exp(a * b) *
             std::exp(-0.5 * b * b * S) * 2.0 / std::sqrt(S) >
             0.5 * tail_tol &&
         S < 1e300)
    S *= 2.0;
  PositiveQuadrature q;
  const double umin = std::log(d), umax = std::log(S);
  for (int p = 0; p < panels; ++p) {
    const double lo = umin + (umax - umin) * p / panels;
    const double hi = umin + (umax - umin) * (p + 1) / panels;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[k];
      const double s = std::exp(u);
      const double logdens = std::log(a / std::sqrt(2.0 * M_PI)) + a * b -
                             1.5 * std::log(s) - 0.5 * sq(a) / s -
                             0.5 * sq(b) * s;
      q.nodes.push_back(s);
      q.weights.push_back(0.5 * (hi - lo) * gl.weights[k] *
                          std::exp(logdens) * s);
    }
  }
  q.tail_mass_bound = tail_tol;
  return q;
}

// ---- compound Poisson -------------------------------------------------------

// Convolution power atoms for a pure-atom mu, coalescing equal locations.
std::vector<LevyAtom> convolve_atoms(const std::vector<LevyAtom>& x,
                                     const std::vector<LevyAtom>& y,
                                     std::size_t cap) {
  std::map<double, double> acc;
  for (const auto& ax : x)
    for (const auto& ay : y) acc[ax.location + ay.location] += ax.mass * ay.mass;
  if (acc.size() > cap)
    throw NumericError("CompoundPoisson: convolution atom count exceeds cap");
  std::vector<LevyAtom> out;
  out.reserve(acc.size());
  for (const auto& [loc, m] : acc) out.push_back({loc, m});
  return out;
}

// Density part handled by a fixed-step grid: mass of cell i at location i*h.
std::vector<LevyAtom> gridded_measure(const CompoundPoisson& cp) {
  std::vector<LevyAtom> base = cp.mu.atoms;
  if (cp.mu.density) {
    const LevyDensity& den = *cp.mu.density;
    const double h = cp.density_step;
    // bounded measure: grid until the declared tail is negligible
    double S = 1.0;
    if (den.tail_rate > 0.0) {
      while (den.tail_c * std::exp(-den.tail_rate * S) / den.tail_rate > 1e-14)
        S *= 2.0;
    } else {
      S = std::pow(den.tail_c / ((den.tail_power - 1.0) * 1e-14),
                   1.0 / (den.tail_power - 1.0));
    }
    for (double s = h; s <= S; s += h) {
      const double m = den.rho(s) * h;
      if (m > 0.0) base.push_back({s, m});
    }
  }
  std::sort(base.begin(), base.end(),
            [](const LevyAtom& a, const LevyAtom& b) {
              return a.location < b.location;
            });
  return base;
}

AtomList atoms_compound_poisson(const CompoundPoisson& cp, double t,
                                double trunc_tol) {
  if (!cp.mu.bounded)
    throw ValidationError("CompoundPoisson requires a bounded Levy measure");
  const std::vector<LevyAtom> base = gridded_measure(cp);
  double M = 0.0;
  for (const auto& a : base) M += a.mass;
  std::map<double, double> acc;
  // k = 0 term: atom at 0
  double pk = std::exp(-t * M);  // e^{-tM} t^k M^k / k! with normalized powers
  acc[0.0] += pk;
  double cum = pk;
  std::vector<LevyAtom> power;  // (mu/M)^{*k}
  std::vector<LevyAtom> unit;
  unit.reserve(base.size());
  for (const auto& a : base) unit.push_back({a.location, a.mass / M});
  power = unit;
  int k = 1;
  const std::size_t cap = 2000000;
  while (cum < 1.0 - trunc_tol) {
    pk *= t * M / k;
    for (const auto& a : power) acc[a.location] += pk * a.mass;
    cum += pk;
    ++k;
    if (k > 10000)
      throw NumericError("CompoundPoisson: Poisson series did not truncate");
    if (cum < 1.0 - trunc_tol) power = convolve_atoms(power, unit, cap);
  }
  AtomList out;
  out.locations.reserve(acc.size());
  out.masses.reserve(acc.size());
  for (const auto& [loc, m] : acc) {
    out.locations.push_back(loc);
    out.masses.push_back(m);
  }
  out.truncation_mass = std::max(0.0, 1.0 - cum);
  return out;
}

}  // namespace

SubordinatorLaw SubordinatorLaw::stable_half(double scale) {
  if (!(scale > 0.0)) throw ValidationError("StableHalf: scale must be > 0");
  return {StableHalf{scale}, "stable-1/2"};
}
SubordinatorLaw SubordinatorLaw::gamma(double rate) {
  if (!(rate > 0.0)) throw ValidationError("GammaLaw: rate must be > 0");
  return {GammaLaw{rate}, "gamma"};
}
SubordinatorLaw SubordinatorLaw::inverse_gaussian(double delta, double gamma) {
  if (!(delta > 0.0) || !(gamma >= 0.0))
    throw ValidationError("InverseGaussian: need delta > 0, gamma >= 0");
  return {InverseGaussian{delta, gamma}, "inverse-gaussian"};
}
SubordinatorLaw SubordinatorLaw::compound_poisson(LevyMeasure mu,
                                                  double density_step) {
  if (!mu.bounded)
    throw ValidationError("CompoundPoisson requires a bounded Levy measure");
  validate_levy_measure(mu);
  return {CompoundPoisson{std::move(mu), density_step}, "compound-poisson"};
}

double density_at(const SubordinatorLaw& law, double t, double s) {
  if (!(t > 0.0)) throw ValidationError("density_at: t must be > 0");
  if (!(s > 0.0)) throw ValidationError("density_at: s must be > 0");
  if (const auto* st = std::get_if<StableHalf>(&law.kind)) {
    const double tau = st->scale * t;
    return tau / (2.0 * std::sqrt(M_PI)) * std::pow(s, -1.5) *
           std::exp(-tau * tau / (4.0 * s));
  }
  if (const auto* g = std::get_if<GammaLaw>(&law.kind)) {
    const double lr = t * std::log(g->rate) + (t - 1.0) * std::log(s) -
                      g->rate * s - std::lgamma(t);
    return std::exp(lr);
  }
  if (const auto* ig = std::get_if<InverseGaussian>(&law.kind)) {
    const double a = ig->delta * t, b = ig->gamma;
    const double lr = std::log(a / std::sqrt(2.0 * M_PI)) + a * b -
                      1.5 * std::log(s) - 0.5 * sq(a) / s - 0.5 * sq(b) * s;
    return std::exp(lr);
  }
  throw ValidationError("density_at: law has no density (CompoundPoisson)");
}

AtomList atoms_at(const SubordinatorLaw& law, double t, double trunc_tol) {
  const auto* cp = std::get_if<CompoundPoisson>(&law.kind);
  if (cp == nullptr)
    throw ValidationError("atoms_at: law is not CompoundPoisson");
  return atoms_compound_poisson(*cp, t, trunc_tol);
}

PositiveQuadrature build_quadrature(const SubordinatorLaw& law, double t,
                                    int n_nodes, double tail_tol) {
  if (!(t > 0.0)) throw ValidationError("build_quadrature: t must be > 0");
  if (n_nodes < 4) throw ValidationError("build_quadrature: n_nodes >= 4");
  PositiveQuadrature q;
  if (const auto* st = std::get_if<StableHalf>(&law.kind)) {
    q = build_quad_stable(st->scale * t, n_nodes, tail_tol);
  } else if (const auto* g = std::get_if<GammaLaw>(&law.kind)) {
    q = build_quad_gamma(t, g->rate, n_nodes, tail_tol);
  } else if (const auto* ig = std::get_if<InverseGaussian>(&law.kind)) {
    if (ig->gamma == 0.0)
      q = build_quad_stable(std::sqrt(2.0) * ig->delta * t, n_nodes, tail_tol);
    else
      q = build_quad_ig(ig->delta * t, ig->gamma, n_nodes, tail_tol);
  } else {
    const AtomList atoms = atoms_at(law, t, 1e-12);
    q.nodes = atoms.locations;
    q.weights = atoms.masses;
    q.tail_mass_bound = atoms.truncation_mass;
    if (q.tail_mass_bound > tail_tol * 100.0 + 1e-12)
      throw NumericError("CompoundPoisson quadrature truncation too large",
                         q.tail_mass_bound);
    return q;
  }
  // density laws: sort, guard signs, and renormalize the tiny truncation away
  // (eta^0 is a probability measure; sigma = 0 laws carry no killing)
  std::vector<std::size_t> idx(q.nodes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return q.nodes[a] < q.nodes[b]; });
  PositiveQuadrature sorted;
  sorted.tail_mass_bound = q.tail_mass_bound;
  double mass = 0.0;
  for (std::size_t i : idx) {
    if (q.weights[i] < -1e-12)
      throw NumericError("build_quadrature: negative weight", q.weights[i]);
    sorted.nodes.push_back(q.nodes[i]);
    sorted.weights.push_back(std::max(q.weights[i], 0.0));
    mass += sorted.weights.back();
  }
  if (!(mass > 0.0))
    throw NumericError("build_quadrature: zero total mass");
  // gross-error catch only; the truncation stub is a few 1e-4 at worst and is
  // renormalized away below
  if (std::abs(mass - 1.0) > 0.01)
    throw NumericError("build_quadrature: mass defect above tolerance",
                       std::abs(mass - 1.0));
  for (auto& w : sorted.weights) w /= mass;
  return sorted;
}

double sample(const SubordinatorLaw& law, double t, Rng& rng) {
  if (!(t > 0.0)) throw ValidationError("sample: t must be > 0");
  if (const auto* cp = std::get_if<CompoundPoisson>(&law.kind)) {
    const std::vector<LevyAtom> base = gridded_measure(*cp);
    double M = 0.0;
    for (const auto& a : base) M += a.mass;
    const double mean = t * M;
    if (mean > 1e3)
      throw BudgetError("sample: CompoundPoisson jump rate too large", mean, 1e3);
    // Poisson count via exponential interarrivals (no underflow at large mean)
    int n = 0;
    double acc = -std::log(rng.next_double()) / mean;
    while (acc <= 1.0) {
      ++n;
      acc += -std::log(rng.next_double()) / mean;
    }
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      double v = rng.next_double() * M;
      double acc = 0.0;
      for (const auto& a : base) {
        acc += a.mass;
        if (v <= acc) {
          s += a.location;
          break;
        }
      }
    }
    return s;
  }
  // density laws: inverse CDF by bisection on a fine quadrature CDF.
  // The rule depends only on (law, t); memoize the last few.
  static std::mutex cdf_mu;
  static std::vector<std::pair<std::array<double, 4>, PositiveQuadrature>> cdf_cache;
  std::array<double, 4> key{(double)law.kind.index(), 0.0, 0.0, t};
  if (const auto* st = std::get_if<StableHalf>(&law.kind)) key[1] = st->scale;
  if (const auto* g = std::get_if<GammaLaw>(&law.kind)) key[1] = g->rate;
  if (const auto* ig = std::get_if<InverseGaussian>(&law.kind)) {
    key[1] = ig->delta;
    key[2] = ig->gamma;
  }
  PositiveQuadrature q;
  {
    std::lock_guard<std::mutex> lock(cdf_mu);
    bool found = false;
    for (const auto& it : cdf_cache)
      if (it.first == key) {
        q = it.second;
        found = true;
        break;
      }
    if (!found) {
      q = build_quadrature(law, t, 1024, 1e-12);
      cdf_cache.emplace_back(key, q);
      if (cdf_cache.size() > 16) cdf_cache.erase(cdf_cache.begin());
    }
  }
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double next = cum + q.weights[i];
    if (u <= next || i + 1 == q.nodes.size()) {
      // linear interpolation inside the cell
      const double frac = q.weights[i] > 0.0 ? (u - cum) / q.weights[i] : 0.5;
      const double lo = i == 0 ? 0.0 : 0.5 * (q.nodes[i - 1] + q.nodes[i]);
      const double hi = i + 1 == q.nodes.size()
                            ? q.nodes[i]
                            : 0.5 * (q.nodes[i] + q.nodes[i + 1]);
      return lo + std::clamp(frac, 0.0, 1.0) * (hi - lo);
    }
    cum = next;
  }
  return q.nodes.back();
}

double law_laplace(const SubordinatorLaw& law, double t, double x) {
  if (std::holds_alternative<CompoundPoisson>(law.kind)) {
    const AtomList atoms = atoms_at(law, t, 1e-14);
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.locations.size(); ++i)
      s += atoms.masses[i] * std::exp(-x * atoms.locations[i]);
    return s;
  }
  // adaptive quadrature in a law-specific variable (decoupled from the fixed-n
  // builder, whose panel layout targets subordination integrands)
  if (const auto* st = std::get_if<StableHalf>(&law.kind)) {
    const double tau = st->scale * t;
    auto f = [&](double v) {
      return 2.0 / std::sqrt(M_PI) * std::exp(-v * v) *
             std::exp(-x * tau * tau / (4.0 * v * v));
    };
    return integrate_adaptive(f, 1e-12, 9.0, 1e-11, 10).value;
  }
  if (const auto* ig = std::get_if<InverseGaussian>(&law.kind)) {
    if (ig->gamma == 0.0) {
      const double tau = std::sqrt(2.0) * ig->delta * t;
      auto f = [&](double v) {
        return 2.0 / std::sqrt(M_PI) * std::exp(-v * v) *
               std::exp(-x * tau * tau / (4.0 * v * v));
      };
      return integrate_adaptive(f, 1e-12, 9.0, 1e-11, 10).value;
    }
    const double a = ig->delta * t, b = ig->gamma;
    double d = sq(a) / 8.0;
    while (std::erfc(a / std::sqrt(2.0 * d)) * std::exp(a * b) > 1e-13 &&
           d > 1e-280)
      d *= 0.5;
    double S = std::max(8.0 * a / b, 1.0);
    while (std::exp(a * b - 0.5 * b * b * S) > 1e-13 && S < 1e300) S *= 2.0;
    auto f = [&](double u) {
      const double s = std::exp(u);
      return std::exp(std::log(a / std::sqrt(2.0 * M_PI)) + a * b -
                      1.5 * std::log(s) - 0.5 * sq(a) / s - 0.5 * sq(b) * s -
                      x * s) *
             s;
    };
    return integrate_adaptive(f, std::log(d), std::log(S), 1e-11, 10).value;
  }
  const auto& g = std::get<GammaLaw>(law.kind);
  // closed Laplace family integrand in log s between analytic cutoffs
  const double lg = std::lgamma(t);
  const double dlo =
      std::pow(1e-16 * std::exp(std::lgamma(t + 1.0)), 1.0 / t) / g.rate;
  const double S = gamma_upper_cutoff(t, g.rate, 1e-16);
  auto f = [&](double u) {
    const double s = std::exp(u);
    return std::exp(t * std::log(g.rate) + (t - 1.0) * std::log(s) -
                    g.rate * s - lg - x * s) *
           s;
  };
  return integrate_adaptive(f, std::log(std::max(dlo, 1e-290)),
                            std::log(S), 1e-11, 10).value;
}

BernsteinTriplet matching_triplet(const SubordinatorLaw& law) {
  if (const auto* st = std::get_if<StableHalf>(&law.kind))
    return triplet_stable_half(st->scale);
  if (const auto* g = std::get_if<GammaLaw>(&law.kind))
    return triplet_gamma(g->rate);
  if (const auto* ig = std::get_if<InverseGaussian>(&law.kind))
    return triplet_inverse_gaussian(ig->delta, ig->gamma);
  const auto& cp = std::get<CompoundPoisson>(law.kind);
  BernsteinTriplet tr;
  tr.mu = cp.mu;
  return tr;
}

}  // namespace chernoff
