#pragma once

#include <cstddef>
#include <vector>

namespace chernoff {

// Dense row-major quadrature discretization of an integral operator at a fixed
// time. Rows are output points, columns carry the quadrature weights already.
//
// apply() parallelizes over rows with OpenMP; each row is an ordered serial
// dot product, so the result is bitwise identical to apply_serial() for any
// thread count. apply_serial() is the reference implementation kept for tests
// and for the bench target.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  KernelMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  std::size_t bytes() const { return a_.size() * sizeof(double); }

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  void apply_serial(const std::vector<double>& x, std::vector<double>& y) const;

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows_);
    apply(x, y);
    return y;
  }

  double min_row_sum() const;
  double max_row_sum() const;
  double min_entry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// Thread count control for every OpenMP region in the library.
void set_thread_count(int threads);
int thread_count();

}  // namespace chernoff
