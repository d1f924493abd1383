#include "chernoff/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace chernoff {

namespace {

GaussLegendre make_gl(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double eps = 1e-15;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_n
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < eps) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gl(order)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double hp = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    const double mid = lo + 0.5 * hp;
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k)
      s += gl.weights[k] * f(mid + 0.5 * hp * gl.nodes[k]);
    sum += 0.5 * hp * s;
  }
  return sum;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double tol, int order,
                              int max_panels) {
  QuadResult r;
  if (!(b > a)) return r;
  int panels = 1;
  double prev = integrate_gl(f, a, b, panels, order);
  double diff = std::abs(prev);
  while (panels < max_panels) {
    panels *= 2;
    double cur = integrate_gl(f, a, b, panels, order);
    diff = std::abs(cur - prev);
    prev = cur;
    if (diff < tol) break;
  }
  r.value = prev;
  r.error_estimate = diff;
  r.panels = panels;
  return r;
}

}  // namespace chernoff
