#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace chernoff {

// Diagnostics a step attaches to its output.
struct StepDiagnostics {
  double truncation_mass = 0.0;   // worst kernel mass lost past the boundary
  double max_row_mass = 0.0;      // largest quadrature row mass seen
  bool used_small_t_floor = false;
  std::vector<std::string> warnings;

  void merge(const StepDiagnostics& o) {
    truncation_mass = std::max(truncation_mass, o.truncation_mass);
    max_row_mass = std::max(max_row_mass, o.max_row_mass);
    used_small_t_floor = used_small_t_floor || o.used_small_t_floor;
    for (const auto& w : o.warnings) warnings.push_back(w);
  }
};

// A function sampled on some state space (the space object lives alongside).
struct SampledFunction {
  std::vector<double> values;
  StepDiagnostics diag;

  SampledFunction() = default;
  explicit SampledFunction(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline double sup_distance(const SampledFunction& a, const SampledFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace chernoff
