#include "chernoff/star_graph.hpp"

#include <omp.h>

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"

namespace chernoff {

StarGraphSpace StarGraphSpace::make(int edges, double extent, int edge_nodes) {
  if (edges < 1) throw ValidationError("StarGraphSpace: need d >= 1 edges");
  if (edge_nodes < 8) throw ValidationError("StarGraphSpace: edge_nodes >= 8");
  if (!(extent > 0.0)) throw ValidationError("StarGraphSpace: extent must be > 0");
  StarGraphSpace s;
  s.edges = edges;
  s.extent = extent;
  s.edge_nodes = edge_nodes;
  s.h = extent / (edge_nodes - 1);
  return s;
}

SampledFunction StarGraphSpace::sample(
    const std::function<double(int, double)>& f) const {
  SampledFunction out;
  out.values.resize(size());
  out.values[0] = f(-1, 0.0);
  for (int k = 0; k < edges; ++k)
    for (int i = 1; i < edge_nodes; ++i)
      out.values[index(k, i)] = f(k, h * i);
  return out;
}

BoundaryWeights BoundaryWeights::make(double a, double c,
                                      std::vector<double> b) {
  BoundaryWeights wts;
  wts.a = a;
  wts.c = c;
  wts.b = std::move(b);
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(a) || !in01(c))
    throw ValidationError("BoundaryWeights: a, c must lie in [0,1]");
  if (a == 1.0) throw ValidationError("BoundaryWeights: a = 1 is excluded");
  double sum = a + c;
  for (double bk : wts.b) {
    if (!in01(bk)) throw ValidationError("BoundaryWeights: b_k must lie in [0,1]");
    sum += bk;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("BoundaryWeights: a + c + sum b_k = 1 violated");
  const double ac = a + c;
  if (ac == 0.0) {
    wts.regime = VertexRegime::absorbing_free;
    wts.w = wts.b;
  } else if (ac == 1.0) {
    wts.regime = VertexRegime::sticky_killed;
    if (!(c > 0.0))
      throw ValidationError("BoundaryWeights: a + c = 1 requires c > 0 (a = 1 excluded)");
    wts.beta = a / c;
  } else {
    wts.regime = VertexRegime::interior;
    if (c == 0.0)
      throw ValidationError(
          "BoundaryWeights: a + c in (0,1) with c = 0 (gamma = 0) is not "
          "covered by the kernel formulas; rejected");
    wts.beta = a / (1.0 - ac);
    wts.gamma = c / (1.0 - ac);
    wts.w.reserve(wts.b.size());
    for (double bk : wts.b) wts.w.push_back(bk / (1.0 - ac));
  }
  return wts;
}

double g_kernel(double t, double z) {
  if (!(t > 0.0)) throw ValidationError("g_kernel: t must be > 0");
  return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

double g_beta_gamma(double beta, double gamma, double t, double z) {
  if (!(gamma > 0.0)) throw ValidationError("g_beta_gamma: gamma must be > 0");
  if (!(t > 0.0)) throw ValidationError("g_beta_gamma: t must be > 0");
  if (!(z >= 0.0)) throw ValidationError("g_beta_gamma: z must be >= 0");
  if (!(beta >= 0.0)) throw ValidationError("g_beta_gamma: beta must be >= 0");
  const double u0 = z / std::sqrt(t);
  if (u0 > 38.0) return 0.0;  // e^{-u0^2/2} below double range
  const double tz = t + gamma * z;
  auto integrand = [&](double u) {
    const double p = u * u * gamma * gamma;
    if (!(p > 0.0)) return 0.0;
    const double w = 2.0 * p * tz / (p + std::sqrt(p * p + 4.0 * p * tz));
    const double tms = (w * w) / p;  // t - s
    const double s = w - gamma * z;
    return std::exp(-0.5 * u * u) * std::exp(-beta * s / gamma) * 2.0 * gamma *
           w / (2.0 * tms + w);
  };
  QuadResult q = integrate_adaptive(integrand, u0, u0 + 12.0, 1e-13, 10);
  if (q.error_estimate > 1e-8)
    throw NumericError("g_beta_gamma: quadrature did not converge",
                       q.error_estimate);
  return q.value / (gamma * gamma) / std::sqrt(2.0 * M_PI);
}

double vertex_hit_mass(double beta, double t, double x) {
  if (!(t > 0.0)) throw ValidationError("vertex_hit_mass: t must be > 0");
  if (x == 0.0) return std::exp(-beta * t);
  const double v0 = x / std::sqrt(t);
  if (v0 > 38.0) return 0.0;
  auto integrand = [&](double v) {
    const double s = x * x / (v * v);
    return std::exp(-0.5 * v * v) * std::exp(-beta * (t - s));
  };
  QuadResult q = integrate_adaptive(integrand, v0, v0 + 12.0, 1e-13, 10);
  if (q.error_estimate > 1e-8)
    throw NumericError("vertex_hit_mass: quadrature did not converge",
                       q.error_estimate);
  return std::sqrt(2.0 / M_PI) * q.value;
}

GBetaGammaTable::GBetaGammaTable(double beta, double gamma, double zeta_max,
                                 int zeta_nodes)
    : beta_(beta),
      gamma_(gamma),
      zeta_max_(zeta_max),
      zeta_nodes_(zeta_nodes),
      log_step_(std::log(2.0) / 64.0) {}

const std::vector<double>& GBetaGammaTable::level(int k) const {
  auto it = levels_.find(k);
  if (it != levels_.end()) return it->second;
  const double t = std::exp(k * log_step_);
  std::vector<double> vals(zeta_nodes_);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < zeta_nodes_; ++j) {
    const double z = (zeta_max_ * j / (zeta_nodes_ - 1)) * std::sqrt(t);
    vals[j] = g_beta_gamma(beta_, gamma_, t, z);
  }
  return levels_.emplace(k, std::move(vals)).first->second;
}

void GBetaGammaTable::prebuild(double tmin, double tmax) const {
  const int k0 = (int)std::floor(std::log(tmin) / log_step_) - 1;
  const int k1 = (int)std::floor(std::log(tmax) / log_step_) + 2;
  for (int k = k0; k <= k1; ++k) (void)level(k);
}

double GBetaGammaTable::value(double t, double z) const {
  const double zeta = z / std::sqrt(t);
  if (zeta >= zeta_max_) return 0.0;
  const double lk = std::log(t) / log_step_;
  const int k0 = (int)std::floor(lk);
  const double ft = lk - k0;
  // cubic (Catmull-Rom) in log t over 4 levels, cubic in zeta per level
  auto interp_zeta = [&](const std::vector<double>& v) {
    const double fz = zeta / zeta_max_ * (zeta_nodes_ - 1);
    int j0 = (int)std::floor(fz);
    if (j0 < 1) j0 = 1;
    if (j0 > zeta_nodes_ - 3) j0 = zeta_nodes_ - 3;
    const double s = fz - j0;
    const double p0 = v[j0 - 1], p1 = v[j0], p2 = v[j0 + 1], p3 = v[j0 + 2];
    return p1 + 0.5 * s * (p2 - p0 +
                           s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                s * (3.0 * (p1 - p2) + p3 - p0)));
  };
  double g[4];
  for (int d = -1; d <= 2; ++d) g[d + 1] = interp_zeta(level(k0 + d));
  const double s = ft;
  return g[1] + 0.5 * s * (g[2] - g[0] +
                           s * (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3] +
                                s * (3.0 * (g[1] - g[2]) + g[3] - g[0])));
}

KernelRow transition_kernel(const BoundaryWeights& weights,
                            const StarGraphSpace& space, double t, int edge,
                            double x, const GBetaGammaTable* table) {
  if (!(t > 0.0)) throw ValidationError("transition_kernel: t must be > 0");
  if (edge >= space.edges)
    throw ValidationError("transition_kernel: edge out of range");
  if (edge < 0) x = 0.0;
  if (x == 0.0) edge = -1;  // source at the vertex

  auto gbg = [&](double z) {
    return table != nullptr ? table->value(t, z)
                            : g_beta_gamma(weights.beta, weights.gamma, t, z);
  };

  KernelRow row;
  row.density.assign(space.size(), 0.0);
  const bool interior = weights.regime == VertexRegime::interior;
  const bool free_entry = weights.regime == VertexRegime::absorbing_free;

  // vertex slot carries the density limit along each edge; for quadrature the
  // matrix builder weights it per edge, here we store the mean for display
  double vertex_limit = 0.0;
  for (int j = 0; j < space.edges; ++j) {
    const double wj = interior ? weights.w[j]
                               : (free_entry ? weights.w[j] : 0.0);
    for (int i = 1; i < space.edge_nodes; ++i) {
      const double y = space.h * i;
      double val = 0.0;
      if (edge == j && edge >= 0)
        val += g_kernel(t, x - y) - g_kernel(t, x + y);  // p^D, same edge only
      if (interior)
        val += 2.0 * wj * gbg(x + y);
      else if (free_entry)
        val += 2.0 * wj * g_kernel(t, x + y);
      row.density[space.index(j, i)] = val;
    }
    double lim = 0.0;  // y -> 0 limit along edge j (p^D limit is 0)
    if (interior)
      lim = 2.0 * wj * gbg(x);
    else if (free_entry)
      lim = 2.0 * wj * g_kernel(t, x);
    vertex_limit += lim / space.edges;
  }
  row.density[0] = vertex_limit;

  switch (weights.regime) {
    case VertexRegime::interior:
      row.atom = weights.gamma * gbg(x);
      break;
    case VertexRegime::absorbing_free:
      row.atom = 0.0;
      break;
    case VertexRegime::sticky_killed:
      row.atom = vertex_hit_mass(weights.beta, t, x);
      break;
  }
  return row;
}

double kernel_row_mass(const KernelRow& row, const StarGraphSpace& space) {
  double mass = row.atom;
  for (int j = 0; j < space.edges; ++j) {
    for (int i = 1; i < space.edge_nodes; ++i) {
      const double w = (i == space.edge_nodes - 1) ? 0.5 * space.h : space.h;
      mass += w * row.density[space.index(j, i)];
    }
    mass += 0.5 * space.h * row.density[0];  // per-edge vertex end, limit value
  }
  return mass;
}

GraphStep::GraphStep(StarGraphSpace space, BoundaryWeights weights,
                     GraphCoefficients coeffs)
    : space_(space), weights_(std::move(weights)), coeffs_(std::move(coeffs)) {
  if (std::abs(coeffs_.B(-1, 0.0)) > 0.0)
    throw ValidationError("GraphStep: B(v) must be 0");
  for (std::size_t i = 0; i < space_.size(); ++i) {
    auto [e, x] = space_.locate(i);
    if (!(coeffs_.A(e, x) > 0.0))
      throw ValidationError("GraphStep: A must be strictly positive");
    if (!(coeffs_.C(e, x) >= 0.0))
      throw ValidationError("GraphStep: C must be nonnegative");
  }
  if (weights_.regime == VertexRegime::interior)
    table_ = std::make_unique<GBetaGammaTable>(weights_.beta, weights_.gamma);
}

std::shared_ptr<const KernelMatrix> GraphStep::matrix(double t) const {
  for (auto& it : cache_)
    if (it.first == t) return it.second;
  const std::size_t n = space_.size();
  auto m = std::make_shared<KernelMatrix>(n, n);
  // table levels are built lazily; build every level the rows will read
  // before the parallel loop so the loop only reads
  if (table_) {
    double tmin = 1e300, tmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [e, x] = space_.locate(i);
      const double xs = e < 0 ? 0.0 : x + t * coeffs_.B(e, x);
      const double a = coeffs_.A(xs <= 0.0 ? -1 : e, std::max(xs, 0.0));
      tmin = std::min(tmin, a * t);
      tmax = std::max(tmax, a * t);
    }
    table_->prebuild(tmin, tmax);
  }
  std::string err;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < (long long)n; ++i) {
    try {
      auto [e, x] = space_.locate(i);
      double xs = x;
      int es = e;
      if (e >= 0) {
        xs = x + t * coeffs_.B(e, x);
        if (xs <= 0.0) {
          xs = 0.0;  // clamp to the vertex (paper's S_t convention)
          es = -1;
        }
      }
      const double tau = coeffs_.A(es, xs) * t;
      const KernelRow row =
          transition_kernel(weights_, space_, tau, es, xs, table_.get());
      const double kill = std::exp(-t * coeffs_.C(e, x));
      double* r = m->row(i);
      // vertex column: per-edge half-weight of the y->0 density limits + atom.
      // transition_kernel stores the edge-averaged limit in slot 0.
      r[0] = kill * (row.atom +
                     space_.edges * 0.5 * space_.h * row.density[0]);
      for (int j = 0; j < space_.edges; ++j)
        for (int k = 1; k < space_.edge_nodes; ++k) {
          const double w = (k == space_.edge_nodes - 1) ? 0.5 * space_.h : space_.h;
          const std::size_t idx = space_.index(j, k);
          r[idx] = kill * w * row.density[idx];
        }
    } catch (const std::exception& ex) {
#pragma omp critical
      if (err.empty()) err = ex.what();
    }
  }
  if (!err.empty()) throw NumericError(err);
  if (m->min_entry() < -1e-12)
    throw NumericError("graph kernel: negative entry", m->min_entry());
  auto out = std::shared_ptr<const KernelMatrix>(m);
  cache_.emplace_back(t, out);
  if (cache_.size() > 8) cache_.erase(cache_.begin());
  return out;
}

SampledFunction GraphStep::apply(double t, const SampledFunction& phi) const {
  if (phi.values.size() != space_.size())
    throw ValidationError("GraphStep: phi not sampled on this graph");
  if (t == 0.0) return phi;
  if (!(t > 0.0)) throw ValidationError("GraphStep: t must be >= 0");
  auto m = matrix(t);
  SampledFunction out(m->apply(phi.values));
  out.diag.max_row_mass = m->max_row_sum();
  if (out.diag.max_row_mass > 1.0 + 1e-6)
    out.diag.warnings.push_back("graph row mass exceeds 1 + 1e-6");
  return out;
}

}  // namespace chernoff
