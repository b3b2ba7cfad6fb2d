#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace market_eq {

// Small row-major square matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }

  // Principal submatrix on `rows` (ascending indices).
  DenseMatrix principal(std::span<const std::size_t> rows) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// Gaussian elimination with partial pivoting. Throws
// SolverError(kSingularSystem) when a pivot vanishes.
std::vector<double> solve_linear(DenseMatrix a, std::vector<double> b);

}  // namespace market_eq
