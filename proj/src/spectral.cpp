#include "sae/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sae/rng.hpp"

namespace sae {

namespace {

// Fixed internal stream so the iteration starts are deterministic without
// threading an Rng through every call site.
constexpr std::uint64_t kIterationSeed = 0x5ae05eedULL;

Matrix gram_smaller(const Matrix& y, bool& transposed_side) {
  // Returns Y*Y^T (n x n) when n <= N, else Y^T*Y (N x N).
  const std::size_t n = y.rows(), N = y.cols();
  transposed_side = n > N;
  if (!transposed_side) {
    Matrix g(n, n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r; c < n; ++c) {
        double s = 0.0;
        const double* yr = y.row(r);
        const double* yc = y.row(c);
        for (std::size_t j = 0; j < N; ++j) s += yr[j] * yc[j];
        g(r, c) = s;
        g(c, r) = s;
      }
    }
    return g;
  }
  Matrix g(N, N, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* yr = y.row(r);
    for (std::size_t i = 0; i < N; ++i) {
      const double v = yr[i];
      if (v == 0.0) continue;
      double* gi = g.row(i);
      for (std::size_t j = 0; j < N; ++j) gi[j] += v * yr[j];
    }
  }
  return g;
}

// Modified Gram-Schmidt with one re-orthogonalization pass.
void orthonormalize(Matrix& q) {
  const std::size_t n = q.rows(), m = q.cols();
  for (std::size_t c = 0; c < m; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += q(r, p) * q(r, c);
        for (std::size_t r = 0; r < n; ++r) q(r, c) -= proj * q(r, p);
      }
    }
    const double nc = q.col_norm(c);
    if (nc < 1e-300) throw ZeroColumn(c);
    q.scale_col(c, 1.0 / nc);
  }
}

void fix_column_signs(Matrix& q) {
  for (std::size_t c = 0; c < q.cols(); ++c) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < q.rows(); ++r) {
      const double a = std::abs(q(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (q(arg, c) < 0.0) q.scale_col(c, -1.0);
  }
}

struct IterationOut {
  Matrix q;
  Vector eigenvalues;
  bool converged;
  std::size_t iters;
  double residual;
};

// Orthogonal iteration on a symmetric PSD matrix g, followed by a
// Rayleigh-Ritz rotation so columns are eigenvector estimates sorted by
// descending eigenvalue.
IterationOut orthogonal_iteration(const Matrix& g, std::size_t m, std::size_t max_iters,
                                  double tol) {
  const std::size_t d = g.rows();
  Rng rng(kIterationSeed, d * 1000003ULL + m);
  Matrix q = gaussian_matrix(d, m, 1.0, rng);
  orthonormalize(q);

  double res = 0.0;
  bool ok = false;
  std::size_t it = 0;
  Matrix b(m, m);
  for (it = 1; it <= max_iters; ++it) {
    Matrix z = matmul(g, q);
    // b = q^T z
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) s += q(r, i) * z(r, j);
        b(i, j) = s;
      }
    // invariant-subspace residual ||g q - q b||
    double rsq = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(b(i, i)));
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t j = 0; j < m; ++j) {
        double v = z(r, j);
        for (std::size_t i = 0; i < m; ++i) v -= q(r, i) * b(i, j);
        rsq += v * v;
      }
    res = std::sqrt(rsq) / std::max(scale, 1e-300);
    q = z;
    orthonormalize(q);
    if (res <= tol) {
      ok = true;
      break;
    }
  }

  // Ritz rotation on the converged basis.
  Matrix z = matmul(g, q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += q(r, i) * z(r, j);
      b(i, j) = s;
    }
  EighResult eig = sym_eigh(b);
  Matrix rotated = matmul(q, eig.vectors);
  fix_column_signs(rotated);
  return {std::move(rotated), std::move(eig.values), ok, std::min(it, max_iters), res};
}

}  // namespace

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  if (rows < 1 || cols < 1) throw DimensionMismatch("gaussian_matrix: empty shape");
  if (!(scale > 0.0)) throw InvalidModel("gaussian_matrix: scale must be positive");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = m.row(r);
    for (std::size_t c = 0; c < cols; ++c) row[c] = scale * rng.normal();
  }
  return m;
}

EighResult sym_eigh(const Matrix& s, double tol, std::size_t max_sweeps) {
  if (s.rows() != s.cols()) throw DimensionMismatch("sym_eigh: matrix not square");
  const std::size_t n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::identity(n);

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    double scale = 0.0;
    for (std::size_t p = 0; p < n; ++p) scale = std::max(scale, std::abs(a(p, p)));
    if (std::sqrt(off) <= tol * std::max(scale, 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - sn * aqr;
          a(q, r) = sn * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - sn * vrq;
          v(r, q) = sn * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EighResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

SubspaceResult top_singular_vectors(const Matrix& y, std::size_t m, std::size_t max_iters,
                                    double tol) {
  if (m < 1 || m > std::min(y.rows(), y.cols()))
    throw DimensionMismatch("top_singular_vectors: m out of range");
  if (max_abs(y) == 0.0) throw Error("top_singular_vectors: zero matrix");

  bool used_right_side = false;
  Matrix g = gram_smaller(y, used_right_side);
  IterationOut it = orthogonal_iteration(g, m, max_iters, tol);

  SubspaceResult out;
  out.converged = it.converged;
  out.iterations = it.iters;
  out.residual = it.residual;
  out.singular_values.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    out.singular_values[j] = std::sqrt(std::max(it.eigenvalues[j], 0.0));

  if (!used_right_side) {
    out.basis = std::move(it.q);
    return out;
  }
  // Right-side iteration returned eigenvectors of Y^T Y; map them to the
  // left singular subspace and re-orthonormalize.
  Matrix u(y.rows(), m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector uj = matvec(y, it.q.col(j));
    const double nj = norm(uj);
    if (nj < 1e-300) throw Error("top_singular_vectors: rank-deficient input");
    for (std::size_t r = 0; r < y.rows(); ++r) u(r, j) = uj[r] / nj;
  }
  orthonormalize(u);
  fix_column_signs(u);
  out.basis = std::move(u);
  return out;
}

double spectral_norm(const Matrix& m, double tol) {
  if (max_abs(m) == 0.0) return 0.0;
  bool used_right_side = false;
  Matrix g = gram_smaller(m, used_right_side);
  const std::size_t d = g.rows();

  Rng rng(kIterationSeed ^ 0x11ULL, d);
  Vector v(d);
  for (auto& x : v) x = rng.normal();
  double nv = norm(v);
  for (auto& x : v) x /= nv;

  double lambda = 0.0;
  for (std::size_t it = 0; it < 5000; ++it) {
    Vector gv = matvec(g, v);
    const double next = dot(v, gv);
    const double ngv = norm(gv);
    if (ngv < 1e-300) return 0.0;
    for (std::size_t i = 0; i < d; ++i) v[i] = gv[i] / ngv;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace sae
