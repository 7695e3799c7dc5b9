#pragma once

#include <cstddef>
#include <vector>

namespace gelmatch {

// Small dense row-major matrix. Everything in this project is at most a few
// hundred rows, and the square systems we solve are (d+1)x(d+1) with d <= 3,
// so plain Gaussian elimination with partial pivoting is all we need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

// Solves a * x = rhs for square a (rhs may carry several columns).
// Throws DegenerateError when a pivot falls below rel_tol * max|a|.
Matrix solve(Matrix a, Matrix rhs, double rel_tol = 1e-12);

double determinant(Matrix a);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace gelmatch
