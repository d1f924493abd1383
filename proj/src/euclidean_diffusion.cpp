#include "chernoff/euclidean_diffusion.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>

#include "chernoff/errors.hpp"

namespace chernoff {

namespace {

std::atomic<std::uint64_t> g_coeff_id{1};

struct Inv2 {
  double i11, i12, i22, det;
};

Inv2 invert_spd(const SymMatrix2& m, int dim) {
  if (dim == 1) {
    if (!(m.a11 > 0.0)) throw NumericError("kernel_pA: A not positive definite");
    return {1.0 / m.a11, 0.0, 0.0, m.a11};
  }
  const double det = m.a11 * m.a22 - m.a12 * m.a12;
  if (!(m.a11 > 0.0) || !(det > 0.0))
    throw NumericError("kernel_pA: A not positive definite");
  return {m.a22 / det, -m.a12 / det, m.a11 / det, det};
}

double lambda_min_of(const SymMatrix2& m, int dim) {
  if (dim == 1) return m.a11;
  const double tr = m.a11 + m.a22;
  const double d = std::sqrt(0.25 * (m.a11 - m.a22) * (m.a11 - m.a22) +
                             m.a12 * m.a12);
  return 0.5 * tr - d;
}

}  // namespace

EuclideanGrid EuclideanGrid::make(int dim, double extent, int axis_nodes) {
  if (dim != 1 && dim != 2)
    throw ValidationError("EuclideanGrid: dim must be 1 or 2");
  if (axis_nodes < 8)
    throw ValidationError("EuclideanGrid: need at least 8 nodes per axis");
  if (!(extent > 0.0)) throw ValidationError("EuclideanGrid: extent must be > 0");
  EuclideanGrid g;
  g.dim = dim;
  g.extent = extent;
  g.axis_nodes = axis_nodes;
  g.h = 2.0 * extent / (axis_nodes - 1);
  return g;
}

double EuclideanGrid::quad_weight(std::size_t idx) const {
  auto axis_w = [&](int i) {
    return (i == 0 || i == axis_nodes - 1) ? 0.5 * h : h;
  };
  if (dim == 1) return axis_w((int)idx);
  return axis_w((int)(idx / axis_nodes)) * axis_w((int)(idx % axis_nodes));
}

SampledFunction EuclideanGrid::sample(
    const std::function<double(std::array<double, 2>)>& f) const {
  SampledFunction out;
  out.values.resize(size());
  for (std::size_t i = 0; i < size(); ++i) out.values[i] = f(point(i));
  return out;
}

DiffusionCoefficients DiffusionCoefficients::make(
    std::function<SymMatrix2(std::array<double, 2>)> A,
    std::function<std::array<double, 2>(std::array<double, 2>)> B,
    std::function<double(std::array<double, 2>)> C, bool constant) {
  DiffusionCoefficients c;
  c.A = std::move(A);
  c.B = std::move(B);
  c.C = std::move(C);
  c.constant = constant;
  c.id = g_coeff_id.fetch_add(1);
  return c;
}

DiffusionCoefficients DiffusionCoefficients::constant_coeffs(
    SymMatrix2 A, std::array<double, 2> B, double C) {
  return make([A](std::array<double, 2>) { return A; },
              [B](std::array<double, 2>) { return B; },
              [C](std::array<double, 2>) { return C; }, true);
}

double validate_coefficients(const DiffusionCoefficients& c,
                             const EuclideanGrid& grid) {
  double lmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    const SymMatrix2 a = c.A(p);
    // Cholesky feasibility
    if (!(a.a11 > 0.0))
      throw ValidationError("DiffusionCoefficients: A11 <= 0");
    if (grid.dim == 2) {
      const double l22 = a.a22 - (a.a12 / std::sqrt(a.a11)) * (a.a12 / std::sqrt(a.a11));
      if (!(l22 > 0.0))
        throw ValidationError("DiffusionCoefficients: A not SPD (Cholesky failed)");
    }
    if (!(c.C(p) >= 0.0))
      throw ValidationError("DiffusionCoefficients: C must be >= 0");
    lmin = std::min(lmin, lambda_min_of(a, grid.dim));
  }
  return lmin;
}

double kernel_pA(const SymMatrix2& A_at_x, int dim, double t,
                 std::array<double, 2> x, std::array<double, 2> y) {
  if (!(t > 0.0)) throw ValidationError("kernel_pA: t must be > 0");
  const Inv2 inv = invert_spd(A_at_x, dim);
  const double dx = x[0] - y[0], dy = dim == 2 ? x[1] - y[1] : 0.0;
  const double quad =
      inv.i11 * dx * dx + 2.0 * inv.i12 * dx * dy + inv.i22 * dy * dy;
  const double norm = std::sqrt(inv.det * std::pow(2.0 * M_PI * t, dim));
  return std::exp(-quad / (2.0 * t)) / norm;
}

std::shared_ptr<const KernelMatrix> EuclideanKernelCache::get(double tau) const {
  for (auto& it : items_)
    if (it.first == tau) return it.second;
  return nullptr;
}

void EuclideanKernelCache::put(double tau,
                               std::shared_ptr<const KernelMatrix> m) {
  bytes_ += m->bytes();
  items_.emplace_back(tau, std::move(m));
  while (bytes_ > max_bytes_ && items_.size() > 1) {
    bytes_ -= items_.front().second->bytes();
    items_.erase(items_.begin());
  }
}

void EuclideanKernelCache::clear() {
  items_.clear();
  bytes_ = 0;
}

DiffusionStep::DiffusionStep(EuclideanGrid grid, DiffusionCoefficients coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  lambda_min_ = validate_coefficients(coeffs_, grid_);
  a_.resize(grid_.size());
  b_.resize(grid_.size());
  c_.resize(grid_.size());
  tr_max_ = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const auto p = grid_.point(i);
    a_[i] = coeffs_.A(p);
    b_[i] = coeffs_.B(p);
    c_[i] = coeffs_.C(p);
    tr_max_ = std::max(tr_max_, grid_.dim == 1 ? a_[i].a11
                                               : a_[i].a11 + a_[i].a22);
  }
}

std::shared_ptr<const KernelMatrix> DiffusionStep::kernel_matrix(
    double tau) const {
  if (auto hit = cache_.get(tau)) return hit;
  const std::size_t n = grid_.size();
  auto m = std::make_shared<KernelMatrix>(n, n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i) {
    const auto x = grid_.point(i);
    const std::array<double, 2> bx = b_[i];
    const std::array<double, 2> c = {x[0] + tau * bx[0], x[1] + tau * bx[1]};
    const Inv2 inv = invert_spd(a_[i], grid_.dim);
    const double norm =
        std::sqrt(inv.det * std::pow(2.0 * M_PI * tau, grid_.dim));
    const double kill = std::exp(-tau * c_[i]);
    double* row = m->row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto y = grid_.point(j);
      const double dx = c[0] - y[0];
      const double dy = grid_.dim == 2 ? c[1] - y[1] : 0.0;
      const double quad =
          inv.i11 * dx * dx + 2.0 * inv.i12 * dx * dy + inv.i22 * dy * dy;
      row[j] =
          kill * std::exp(-quad / (2.0 * tau)) / norm * grid_.quad_weight(j);
    }
  }
  if (m->min_entry() < -1e-12)
    throw NumericError("diffusion kernel: negative entry", m->min_entry());
  cache_.put(tau, m);
  return m;
}

namespace {

// 3-point Lagrange interpolation of a grid function at an off-grid point;
// zero outside the box.
double interp3(const EuclideanGrid& g, const std::vector<double>& v,
               std::array<double, 2> q) {
  auto axis = [&](double xq, int& i0, double& s) {
    double fi = (xq + g.extent) / g.h;
    i0 = (int)std::lround(fi);
    if (i0 < 1) i0 = 1;
    if (i0 > g.axis_nodes - 2) i0 = g.axis_nodes - 2;
    s = fi - i0;
  };
  if (q[0] < -g.extent - 0.5 * g.h || q[0] > g.extent + 0.5 * g.h) return 0.0;
  int i0;
  double s;
  axis(q[0], i0, s);
  const double wm = 0.5 * s * (s - 1.0), w0 = 1.0 - s * s,
               wp = 0.5 * s * (s + 1.0);
  if (g.dim == 1)
    return wm * v[i0 - 1] + w0 * v[i0] + wp * v[i0 + 1];
  if (q[1] < -g.extent - 0.5 * g.h || q[1] > g.extent + 0.5 * g.h) return 0.0;
  int j0;
  double r;
  axis(q[1], j0, r);
  const double um = 0.5 * r * (r - 1.0), u0 = 1.0 - r * r,
               up = 0.5 * r * (r + 1.0);
  auto at = [&](int i, int j) { return v[(std::size_t)i * g.axis_nodes + j]; };
  double acc = 0.0;
  const double wx[3] = {wm, w0, wp};
  const double wy[3] = {um, u0, up};
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj)
      acc += wx[di + 1] * wy[dj + 1] * at(i0 + di, j0 + dj);
  return acc;
}

}  // namespace

SampledFunction DiffusionStep::apply_fd(double tau,
                                        const SampledFunction& phi) const {
  // Euler substeps under the L-infinity stability limit tau_sub * tr A <= h^2/2
  const double h2 = grid_.h * grid_.h;
  const int substeps =
      std::max(1, (int)std::ceil(tau * tr_max_ / (0.5 * h2)));
  const double dt = tau / substeps;
  const std::size_t n = grid_.size();
  const int an = grid_.axis_nodes;
  std::vector<double> cur = phi.values, next(n);
  for (int step = 0; step < substeps; ++step) {
#pragma omp parallel for schedule(static)
    for (long long idx = 0; idx < (long long)n; ++idx) {
      const auto x = grid_.point(idx);
      const auto& A = a_[idx];
      double lap;
      if (grid_.dim == 1) {
        const long long i = idx;
        const double vm = i > 0 ? cur[i - 1] : 0.0;
        const double vp = i + 1 < (long long)n ? cur[i + 1] : 0.0;
        lap = A.a11 * (vm - 2.0 * cur[i] + vp) / h2;
      } else {
        const int i = (int)(idx / an), j = (int)(idx % an);
        auto at = [&](int ii, int jj) {
          if (ii < 0 || jj < 0 || ii >= an || jj >= an) return 0.0;
          return cur[(std::size_t)ii * an + jj];
        };
        const double dxx = (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j)) / h2;
        const double dyy = (at(i, j - 1) - 2.0 * at(i, j) + at(i, j + 1)) / h2;
        const double dxy = (at(i + 1, j + 1) - at(i + 1, j - 1) -
                            at(i - 1, j + 1) + at(i - 1, j - 1)) /
                           (4.0 * h2);
        lap = A.a11 * dxx + 2.0 * A.a12 * dxy + A.a22 * dyy;
      }
      const std::array<double, 2> q = {x[0] + dt * b_[idx][0],
                                       x[1] + dt * b_[idx][1]};
      const double shifted = interp3(grid_, cur, q);
      next[idx] = std::exp(-dt * c_[idx]) * (shifted + 0.5 * dt * lap);
    }
    cur.swap(next);
  }
  SampledFunction out(std::move(cur));
  out.diag.used_small_t_floor = true;
  out.diag.max_row_mass = 1.0;
  return out;
}

SampledFunction DiffusionStep::apply(double t, const SampledFunction& phi) const {
  if (phi.values.size() != grid_.size())
    throw ValidationError("DiffusionStep: phi not sampled on this grid");
  if (t == 0.0) return phi;
  if (!(t > 0.0)) throw ValidationError("DiffusionStep: t must be >= 0");
  const double h2 = grid_.h * grid_.h;
  if (t * lambda_min_ < kTauAlias * h2) return apply_fd(t, phi);
  auto m = kernel_matrix(t);
  SampledFunction out(m->apply(phi.values));
  const double max_mass = m->max_row_sum();
  const double min_mass = m->min_row_sum();
  out.diag.max_row_mass = max_mass;
  out.diag.truncation_mass = std::max(0.0, 1.0 - min_mass);
  if (out.diag.truncation_mass > trunc_bound_)
    out.diag.warnings.push_back("kernel mass leaks past the grid boundary");
  if (max_mass > 1.0 + 1e-6)
    out.diag.warnings.push_back("row mass exceeds 1 + 1e-6");
  return out;
}

SampledFunction DiffusionStep::apply_rowwise(const std::vector<double>& times,
                                             const SampledFunction& phi) const {
  if (times.size() != grid_.size())
    throw ValidationError("apply_rowwise: one time per row required");
  const std::size_t n = grid_.size();
  const double h2 = grid_.h * grid_.h;
  SampledFunction out;
  out.values.resize(n);
  const int an = grid_.axis_nodes;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i) {
    const double tau = times[i];
    const auto x = grid_.point(i);
    if (tau == 0.0) {
      out.values[i] = phi.values[i];
      continue;
    }
    if (tau * lambda_min_of(a_[i], grid_.dim) < kTauAlias * h2) {
      // single Euler stencil row: e^{-tau C}(phi(x + tau B) + tau/2 A:Hess phi)
      const auto& A = a_[i];
      double lap;
      if (grid_.dim == 1) {
        const double vm = i > 0 ? phi.values[i - 1] : 0.0;
        const double vp = i + 1 < (long long)n ? phi.values[i + 1] : 0.0;
        lap = A.a11 * (vm - 2.0 * phi.values[i] + vp) / h2;
      } else {
        const int ii = (int)(i / an), jj = (int)(i % an);
        auto at = [&](int a, int b2) {
          if (a < 0 || b2 < 0 || a >= an || b2 >= an) return 0.0;
          return phi.values[(std::size_t)a * an + b2];
        };
        const double dxx = (at(ii - 1, jj) - 2.0 * at(ii, jj) + at(ii + 1, jj)) / h2;
        const double dyy = (at(ii, jj - 1) - 2.0 * at(ii, jj) + at(ii, jj + 1)) / h2;
        const double dxy = (at(ii + 1, jj + 1) - at(ii + 1, jj - 1) -
                            at(ii - 1, jj + 1) + at(ii - 1, jj - 1)) /
                           (4.0 * h2);
        lap = A.a11 * dxx + 2.0 * A.a12 * dxy + A.a22 * dyy;
      }
      const std::array<double, 2> q = {x[0] + tau * b_[i][0],
                                       x[1] + tau * b_[i][1]};
      out.values[i] =
          std::exp(-tau * c_[i]) * (interp3(grid_, phi.values, q) + 0.5 * tau * lap);
      continue;
    }
    const std::array<double, 2> c = {x[0] + tau * b_[i][0],
                                     x[1] + tau * b_[i][1]};
    const Inv2 inv = invert_spd(a_[i], grid_.dim);
    const double norm =
        std::sqrt(inv.det * std::pow(2.0 * M_PI * tau, grid_.dim));
    const double kill = std::exp(-tau * c_[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto y = grid_.point(j);
      const double dx = c[0] - y[0];
      const double dy = grid_.dim == 2 ? c[1] - y[1] : 0.0;
      const double quad =
          inv.i11 * dx * dx + 2.0 * inv.i12 * dx * dy + inv.i22 * dy * dy;
      s += std::exp(-quad / (2.0 * tau)) / norm * grid_.quad_weight(j) *
           phi.values[j];
    }
    out.values[i] = kill * s;
  }
  return out;
}

}  // namespace chernoff
