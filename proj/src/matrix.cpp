#include "sae/matrix.hpp"

namespace sae {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) throw DimensionMismatch("matvec: dimensions differ");
  Vector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += row[c] * v[c];
    out[r] = s;
  }
  return out;
}

Vector tmatvec(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) throw DimensionMismatch("tmatvec: dimensions differ");
  Vector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    const double vr = v[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * vr;
  }
  return out;
}

void add_scaled(Matrix& a, double s, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("add_scaled: shapes differ");
  double* pa = a.data().data();
  const double* pb = b.data().data();
  const std::size_t n = a.data().size();
  for (std::size_t i = 0; i < n; ++i) pa[i] += s * pb[i];
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("subtract: shapes differ");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

double frobenius_norm_sq(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return s;
}

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

Matrix normalize_columns(const Matrix& m, double min_norm) {
  Matrix out = m;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double nc = m.col_norm(c);
    if (nc < min_norm) throw ZeroColumn(c);
    const double inv = 1.0 / nc;
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) *= inv;
  }
  return out;
}

}  // namespace sae
