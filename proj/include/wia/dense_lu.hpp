#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wia {

/// Square row-major matrix.
class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// LU factorisation with partial pivoting. Throws singular_system_error when
/// a pivot falls below `pivot_tol` times the largest entry of the matrix.
class DenseLu {
 public:
  explicit DenseLu(DenseMatrix a, double pivot_tol = 1e-13);

  std::vector<double> solve(std::span<const double> rhs) const;
  std::size_t size() const { return lu_.size(); }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace wia
