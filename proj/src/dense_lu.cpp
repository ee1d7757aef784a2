#include "wia/dense_lu.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wia/errors.hpp"

namespace wia {

DenseLu::DenseLu(DenseMatrix a, double pivot_tol) : lu_(std::move(a)), perm_(lu_.size()) {
  const std::size_t n = lu_.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(lu_(i, j)));
  if (scale == 0.0) throw singular_system_error("DenseLu: zero matrix");

  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    if (best <= pivot_tol * scale)
      throw singular_system_error("DenseLu: matrix is singular to working precision at column " +
                                  std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) * inv;
      if (f == 0.0) continue;
      lu_(i, k) = f;
      double* row_i = &lu_(i, 0);
      const double* row_k = &lu_(k, 0);
      for (std::size_t j = k + 1; j < n; ++j) row_i[j] -= f * row_k[j];
    }
  }
}

std::vector<double> DenseLu::solve(std::span<const double> rhs) const {
  const std::size_t n = lu_.size();
  if (rhs.size() != n) throw std::invalid_argument("DenseLu::solve: size mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = rhs[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = x[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc / lu_(i, i);
  }
  return x;
}

}  // namespace wia
