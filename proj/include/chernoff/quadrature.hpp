#pragma once

#include <functional>
#include <vector>

namespace chernoff {

// Gauss-Legendre rule on [-1,1]. Nodes by Newton iteration on P_n; cached by
// order process-wide (read-only after first construction of each order).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int order);

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Composite Gauss-Legendre over [a,b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order);

// Panel-doubling composite GL until |I_2p - I_p| < tol (absolute) or the
// panel budget is exhausted. Never throws; callers inspect error_estimate.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double tol, int order = 8,
                              int max_panels = 1 << 14);

}  // namespace chernoff
