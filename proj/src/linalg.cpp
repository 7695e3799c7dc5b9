#include "gelmatch/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gelmatch/errors.hpp"

namespace gelmatch {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double ark = a(r, k);
      if (ark == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

namespace {

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v = std::max(v, std::abs(m(r, c)));
  return v;
}

}  // namespace

Matrix solve(Matrix a, Matrix rhs, double rel_tol) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("solve: matrix not square");
  if (rhs.rows() != n) throw std::invalid_argument("solve: rhs shape mismatch");
  const double tol = rel_tol * std::max(1.0, max_abs(a));

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= tol)
      throw DegenerateError("solve: singular system (pivot below tolerance)");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      for (std::size_t c = 0; c < rhs.cols(); ++c) std::swap(rhs(col, c), rhs(pivot, c));
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < rhs.cols(); ++c) rhs(r, c) -= f * rhs(col, c);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double inv = 1.0 / a(r, r);
    for (std::size_t c = 0; c < rhs.cols(); ++c) rhs(r, c) *= inv;
  }
  return rhs;
}

double determinant(Matrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("determinant: matrix not square");
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      det = -det;
    }
    det *= a(col, col);
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double v = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) v = std::max(v, std::abs(a(r, c) - b(r, c)));
  return v;
}

}  // namespace gelmatch
