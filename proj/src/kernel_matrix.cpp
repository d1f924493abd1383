#include "chernoff/kernel_matrix.hpp"

#include <omp.h>

#include <algorithm>

namespace chernoff {

void KernelMatrix::apply(const std::vector<double>& x,
                         std::vector<double>& y) const {
  y.resize(rows_);
  const double* xp = x.data();
  const std::size_t n = cols_;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)rows_; ++i) {
    const double* r = a_.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += r[j] * xp[j];
    y[i] = s;
  }
}

void KernelMatrix::apply_serial(const std::vector<double>& x,
                                std::vector<double>& y) const {
  y.resize(rows_);
  const double* xp = x.data();
  const std::size_t n = cols_;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = a_.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += r[j] * xp[j];
    y[i] = s;
  }
}

double KernelMatrix::min_row_sum() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += r[j];
    m = (i == 0) ? s : std::min(m, s);
  }
  return m;
}

double KernelMatrix::max_row_sum() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += r[j];
    m = (i == 0) ? s : std::max(m, s);
  }
  return m;
}

double KernelMatrix::min_entry() const {
  double m = a_.empty() ? 0.0 : a_[0];
  for (double v : a_) m = std::min(m, v);
  return m;
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace chernoff
