#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sae/error.hpp"

namespace sae {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Column views are materialized on
/// demand; hot loops are written against contiguous rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Vector col(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_col(std::size_t c, const Vector& v) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }

  double col_norm(std::size_t c) const {
    double s = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      double v = (*this)(r, c);
      s += v * v;
    }
    return std::sqrt(s);
  }

  double col_dot(std::size_t c, const Vector& v) const {
    double s = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) s += (*this)(r, c) * v[r];
    return s;
  }

  void scale_col(std::size_t c, double a) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) *= a;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---- vector helpers ----

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double norm_sq(const Vector& a) { return dot(a, a); }

inline void axpy(double a, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vector subtract(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// ---- matrix products ----

Matrix matmul(const Matrix& a, const Matrix& b);

/// y = M v
Vector matvec(const Matrix& m, const Vector& v);

/// y = M^T v, computed row-wise so access stays contiguous.
Vector tmatvec(const Matrix& m, const Vector& v);

/// a += s * b (elementwise)
void add_scaled(Matrix& a, double s, const Matrix& b);

Matrix subtract(const Matrix& a, const Matrix& b);

double frobenius_norm_sq(const Matrix& m);
double max_abs(const Matrix& m);

/// Rescales every column to unit Euclidean norm.
/// Throws ZeroColumn if a column has norm below `min_norm`.
Matrix normalize_columns(const Matrix& m, double min_norm = 1e-12);

}  // namespace sae
