#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive and separate from the library code paths they check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sae/encoder.hpp"
#include "sae/gradient.hpp"
#include "sae/matrix.hpp"

namespace oracles {

using sae::Matrix;
using sae::Vector;

inline Vector naive_matvec(const Matrix& m, const Vector& v) {
  Vector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r] += m(r, c) * v[c];
  return out;
}

// Classic Jacobi diagonalization with explicit Givens rotations, kept
// separate from the library's eigensolver. Eigenvalues descending,
// eigenvectors as matching columns of `vecs`.
struct JacobiResult {
  std::vector<double> values;
  Matrix vecs;
};

inline JacobiResult jacobi_eigensolver(Matrix a) {
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off < 1e-14) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double phi = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        const double c = std::cos(phi), s = std::sin(phi);
        Matrix rot = Matrix::identity(n);
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        // a <- rot^T a rot, v <- v rot
        Matrix at(n, n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += rot(k, i) * a(k, j);
            at(i, j) = acc;
          }
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += at(i, k) * rot(k, j);
            a(i, j) = acc;
          }
        Matrix vn(n, n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += v(i, k) * rot(k, j);
            vn(i, j) = acc;
          }
        v = vn;
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  JacobiResult out;
  out.values.resize(n);
  out.vecs = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) out.vecs(r, j) = v(r, order[j]);
  }
  return out;
}

inline Matrix gram_of(const Matrix& y) {
  Matrix g(y.rows(), y.rows(), 0.0);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) s += y(i, c) * y(j, c);
      g(i, j) = s;
    }
  return g;
}

// Exhaustive assignment search: every permutation, per-pair best sign when
// flips are on (equivalent to trying all sign patterns, since signs act
// independently per pair).
struct BruteMatch {
  std::vector<std::size_t> permutation;
  std::vector<double> signs;
  double cost = 0.0;
};

inline BruteMatch brute_force_match(const Matrix& w, const Matrix& a, bool allow_sign_flip) {
  const std::size_t m = w.cols();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  BruteMatch best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    std::vector<double> signs(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      double plus = 0.0, minus = 0.0;
      for (std::size_t r = 0; r < w.rows(); ++r) {
        const double wp = w(r, perm[i]) - a(r, i);
        const double wm = -w(r, perm[i]) - a(r, i);
        plus += wp * wp;
        minus += wm * wm;
      }
      if (allow_sign_flip && minus < plus) {
        total += minus;
        signs[i] = -1.0;
      } else {
        total += plus;
      }
    }
    if (total < best.cost) {
      best.cost = total;
      best.permutation = perm;
      best.signs = signs;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Single-sample approximate gradient computed the expensive way: build the
// n x n matrix (W_i^T y I + b_i I + y W_i^T) and apply it to the residual.
inline Matrix dense_gradient(const sae::AutoencoderParams& p, const Vector& y) {
  const std::size_t n = p.n(), m = p.m();
  const sae::Encoding e = sae::encode(p, y);
  Vector residual = y;
  const Vector yhat = sae::decode(p, e.x);
  for (std::size_t r = 0; r < n; ++r) residual[r] -= yhat[r];

  Matrix g(n, m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (e.x[i] == 0.0) continue;
    double wy = 0.0;
    for (std::size_t r = 0; r < n; ++r) wy += p.W(r, i) * y[r];
    Matrix op(n, n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      op(r, r) += wy + p.b[i];
      for (std::size_t c = 0; c < n; ++c) op(r, c) += y[r] * p.W(c, i);
    }
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) acc += op(r, c) * residual[c];
      g(r, i) = -acc;
    }
  }
  return g;
}

inline double batch_mean_loss(const sae::AutoencoderParams& p,
                              const std::vector<sae::Sample>& samples) {
  double s = 0.0;
  for (const auto& smp : samples) s += sae::loss(p, smp.y);
  return s / static_cast<double>(samples.size());
}

// Central finite differences of the batch loss with respect to every W entry.
inline Matrix finite_difference_w(const sae::AutoencoderParams& p,
                                  const std::vector<sae::Sample>& samples, double h) {
  Matrix g(p.n(), p.m(), 0.0);
  sae::AutoencoderParams probe = p;
  for (std::size_t r = 0; r < p.n(); ++r) {
    for (std::size_t c = 0; c < p.m(); ++c) {
      const double orig = probe.W(r, c);
      probe.W(r, c) = orig + h;
      const double up = batch_mean_loss(probe, samples);
      probe.W(r, c) = orig - h;
      const double down = batch_mean_loss(probe, samples);
      probe.W(r, c) = orig;
      g(r, c) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline Vector finite_difference_b(const sae::AutoencoderParams& p,
                                  const std::vector<sae::Sample>& samples, double h) {
  Vector g(p.m(), 0.0);
  sae::AutoencoderParams probe = p;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const double orig = probe.b[i];
    probe.b[i] = orig + h;
    const double up = batch_mean_loss(probe, samples);
    probe.b[i] = orig - h;
    const double down = batch_mean_loss(probe, samples);
    probe.b[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Monte Carlo batch gradient with an empirical standard error per entry,
// from independent chunk means.
struct McEstimate {
  Matrix mean;
  Matrix se;
  Vector bias_mean;
  Vector bias_se;
};

inline McEstimate chunked_gradient(const sae::AutoencoderParams& p,
                                   const std::vector<sae::Sample>& samples,
                                   std::size_t chunks) {
  const std::size_t per = samples.size() / chunks;
  std::vector<Matrix> means;
  std::vector<Vector> bmeans;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::vector<sae::Sample> chunk(samples.begin() + c * per, samples.begin() + (c + 1) * per);
    sae::GradientEstimate g = sae::batch_gradient(p, chunk);
    means.push_back(g.G);
    bmeans.push_back(g.g_b);
  }
  McEstimate out;
  out.mean = Matrix(p.n(), p.m(), 0.0);
  out.se = Matrix(p.n(), p.m(), 0.0);
  out.bias_mean.assign(p.m(), 0.0);
  out.bias_se.assign(p.m(), 0.0);
  const double inv = 1.0 / static_cast<double>(chunks);
  for (const auto& g : means) sae::add_scaled(out.mean, inv, g);
  for (std::size_t i = 0; i < chunks; ++i)
    for (std::size_t j = 0; j < p.m(); ++j) out.bias_mean[j] += bmeans[i][j] * inv;
  for (std::size_t r = 0; r < p.n(); ++r)
    for (std::size_t c = 0; c < p.m(); ++c) {
      double var = 0.0;
      for (const auto& g : means) {
        const double d = g(r, c) - out.mean(r, c);
        var += d * d;
      }
      var /= static_cast<double>(chunks - 1);
      out.se(r, c) = std::sqrt(var / static_cast<double>(chunks));
    }
  for (std::size_t j = 0; j < p.m(); ++j) {
    double var = 0.0;
    for (const auto& b : bmeans) {
      const double d = b[j] - out.bias_mean[j];
      var += d * d;
    }
    var /= static_cast<double>(chunks - 1);
    out.bias_se[j] = std::sqrt(var / static_cast<double>(chunks));
  }
  return out;
}

}  // namespace oracles
