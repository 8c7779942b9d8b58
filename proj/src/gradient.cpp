#include "sae/gradient.hpp"

#include <atomic>
#include <cmath>
#include <future>

namespace sae {

namespace {

std::atomic<unsigned> g_workers{1};

constexpr std::size_t kBlock = 1024;  // samples per reduction leaf

// Gradient sums are kept transposed (m x n) so each active column is a
// contiguous row during accumulation.
struct Accum {
  Matrix gt;
  Vector gb;
  double loss_sum = 0.0;
  std::size_t consistent = 0;

  Accum(std::size_t m, std::size_t n) : gt(m, n, 0.0), gb(m, 0.0) {}

  void combine(const Accum& other) {
    add_scaled(gt, 1.0, other.gt);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += other.gb[i];
    loss_sum += other.loss_sum;
    consistent += other.consistent;
  }
};

struct Workspace {
  Vector z;
  Vector r;
  std::vector<std::size_t> active;
  Workspace(std::size_t m, std::size_t n) : z(m), r(n) { active.reserve(m); }
};

void accumulate_sample(const AutoencoderParams& p, const Vector& y, const LatentCode* code,
                       Accum& acc, Workspace& ws, bool with_gradient) {
  const std::size_t n = p.n(), m = p.m();
  const Matrix& W = p.W;

  // z = W^T y + b, row-wise for contiguous access
  for (std::size_t i = 0; i < m; ++i) ws.z[i] = p.b[i];
  for (std::size_t r = 0; r < n; ++r) {
    const double* wr = W.row(r);
    const double yr = y[r];
    for (std::size_t i = 0; i < m; ++i) ws.z[i] += wr[i] * yr;
  }

  ws.active.clear();
  for (std::size_t i = 0; i < m; ++i)
    if (apply_activation(p.activation, p.lambda, ws.z[i]) != 0.0) ws.active.push_back(i);

  // residual r = y - W x with x supported on the active set
  ws.r = y;
  for (const std::size_t i : ws.active) {
    const double xi = ws.z[i];
    for (std::size_t r = 0; r < n; ++r) ws.r[r] -= xi * W(r, i);
  }

  acc.loss_sum += 0.5 * norm_sq(ws.r);
  if (code != nullptr && ws.active == code->support) ++acc.consistent;

  if (!with_gradient) return;
  for (const std::size_t i : ws.active) {
    double wr = 0.0;
    for (std::size_t r = 0; r < n; ++r) wr += W(r, i) * ws.r[r];
    acc.gb[i] -= wr;
    const double zi = ws.z[i];
    double* gi = acc.gt.row(i);
    for (std::size_t c = 0; c < n; ++c) gi[c] -= zi * ws.r[c] + wr * y[c];
  }
}

Accum accumulate_range(const AutoencoderParams& p, const std::vector<Sample>& samples,
                       std::size_t lo, std::size_t hi, bool with_gradient) {
  Accum acc(p.m(), p.n());
  Workspace ws(p.m(), p.n());
  for (std::size_t i = lo; i < hi; ++i)
    accumulate_sample(p, samples[i].y, &samples[i].code, acc, ws, with_gradient);
  return acc;
}

// Pairwise tree over fixed sample blocks. The tree shape depends only on
// the batch size; the thread budget just decides which subtrees run
// concurrently, so sums come out bitwise identical for any worker count.
Accum reduce_tree(const AutoencoderParams& p, const std::vector<Sample>& samples,
                  std::size_t block_lo, std::size_t block_hi, bool with_gradient,
                  unsigned budget) {
  if (block_hi - block_lo == 1) {
    const std::size_t lo = block_lo * kBlock;
    const std::size_t hi = std::min(samples.size(), lo + kBlock);
    return accumulate_range(p, samples, lo, hi, with_gradient);
  }
  const std::size_t mid = block_lo + (block_hi - block_lo) / 2;
  if (budget >= 2) {
    auto left = std::async(std::launch::async, reduce_tree, std::cref(p), std::cref(samples),
                           block_lo, mid, with_gradient, budget / 2);
    Accum right = reduce_tree(p, samples, mid, block_hi, with_gradient, budget - budget / 2);
    Accum result = left.get();
    result.combine(right);
    return result;
  }
  Accum result = reduce_tree(p, samples, block_lo, mid, with_gradient, 1);
  Accum right = reduce_tree(p, samples, mid, block_hi, with_gradient, 1);
  result.combine(right);
  return result;
}

Accum reduce_batch(const AutoencoderParams& p, const std::vector<Sample>& samples,
                   bool with_gradient) {
  if (samples.empty()) throw EmptyBatch();
  if (samples.front().y.size() != p.n())
    throw DimensionMismatch("batch_gradient: sample dimension mismatch");
  const std::size_t blocks = (samples.size() + kBlock - 1) / kBlock;
  return reduce_tree(p, samples, 0, blocks, with_gradient, g_workers.load());
}

GradientEstimate finalize(const Accum& acc, std::size_t n, std::size_t m, std::size_t count) {
  GradientEstimate g;
  g.G = Matrix(n, m);
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < m; ++i) g.G(r, i) = acc.gt(i, r) * inv;
  g.g_b.resize(m);
  for (std::size_t i = 0; i < m; ++i) g.g_b[i] = acc.gb[i] * inv;
  g.n_samples = count;
  return g;
}

Vector column_dots(const Matrix& a, const Matrix& b) {
  // d_i = <a_i, b_i>, accumulated row-wise
  Vector d(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* ar = a.row(r);
    const double* br = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) d[i] += ar[i] * br[i];
  }
  return d;
}

Matrix gram_product(const Matrix& a, const Matrix& b) {
  // (a^T b)(i, j) = <a_i, b_j>
  Matrix g(a.cols(), b.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* ar = a.row(r);
    const double* br = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double v = ar[i];
      if (v == 0.0) continue;
      double* gi = g.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) gi[j] += v * br[j];
    }
  }
  return g;
}

}  // namespace

void set_worker_threads(unsigned n) { g_workers.store(n < 1 ? 1 : n); }
unsigned worker_threads() { return g_workers.load(); }

GradientEstimate approx_gradient_sample(const AutoencoderParams& params, const Vector& y) {
  if (y.size() != params.n())
    throw DimensionMismatch("approx_gradient_sample: y has wrong length");
  Accum acc(params.m(), params.n());
  Workspace ws(params.m(), params.n());
  accumulate_sample(params, y, nullptr, acc, ws, true);
  return finalize(acc, params.n(), params.m(), 1);
}

GradientEstimate batch_gradient(const AutoencoderParams& params,
                                const std::vector<Sample>& samples) {
  Accum acc = reduce_batch(params, samples, true);
  return finalize(acc, params.n(), params.m(), samples.size());
}

BatchStats batch_gradient_stats(const AutoencoderParams& params,
                                const std::vector<Sample>& samples) {
  Accum acc = reduce_batch(params, samples, true);
  BatchStats s;
  s.grad = finalize(acc, params.n(), params.m(), samples.size());
  s.mean_loss = acc.loss_sum / static_cast<double>(samples.size());
  s.support_consistency_rate =
      static_cast<double>(acc.consistent) / static_cast<double>(samples.size());
  return s;
}

LossStats batch_loss_stats(const AutoencoderParams& params, const std::vector<Sample>& samples) {
  Accum acc = reduce_batch(params, samples, false);
  LossStats s;
  s.mean_loss = acc.loss_sum / static_cast<double>(samples.size());
  s.support_consistency_rate =
      static_cast<double>(acc.consistent) / static_cast<double>(samples.size());
  return s;
}

GradientEstimate expected_gradient_gmm(const Matrix& W, const Vector& b, const Matrix& A) {
  if (W.rows() != A.rows() || W.cols() != A.cols())
    throw DimensionMismatch("expected_gradient_gmm: W and A shapes differ");
  if (b.size() != W.cols()) throw DimensionMismatch("expected_gradient_gmm: bias length");
  const std::size_t n = W.rows(), m = W.cols();
  const double p = 1.0 / static_cast<double>(m);

  const Vector lambda = column_dots(W, A);
  Vector wcoef(m);
  for (std::size_t i = 0; i < m; ++i)
    wcoef[i] = p * (lambda[i] * lambda[i] + 2.0 * b[i] * lambda[i] + b[i] * b[i]);

  GradientEstimate g;
  g.G = Matrix(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    const double* wr = W.row(r);
    const double* ar = A.row(r);
    double* gr = g.G.row(r);
    for (std::size_t i = 0; i < m; ++i) gr[i] = -p * lambda[i] * ar[i] + wcoef[i] * wr[i];
  }
  g.g_b.resize(m);
  for (std::size_t i = 0; i < m; ++i) g.g_b[i] = -p * b[i];
  g.n_samples = 0;
  return g;
}

GradientEstimate expected_gradient_sparse(const Matrix& W, const Matrix& A, double p_single,
                                          double p_pair) {
  if (W.rows() != A.rows() || W.cols() != A.cols())
    throw DimensionMismatch("expected_gradient_sparse: W and A shapes differ");
  const std::size_t n = W.rows(), m = W.cols();

  const Matrix wta = gram_product(W, A);  // wta(j, i) = <W_j, A_i>
  const Matrix wtw = gram_product(W, W);
  Vector lambda(m);
  for (std::size_t i = 0; i < m; ++i) lambda[i] = wta(i, i);

  // u(j, i) = p_ij <W_j, A_i> for j != i, 0 on the diagonal
  Matrix u = wta;
  for (std::size_t j = 0; j < m; ++j) {
    double* uj = u.row(j);
    for (std::size_t i = 0; i < m; ++i) uj[i] = (i == j) ? 0.0 : p_pair * uj[i];
  }
  // cross(r, i) = (W_{-i} diag(p_ij) W_{-i}^T A_i)_r
  const Matrix cross = matmul(W, u);

  Vector scoef(m, 0.0);  // W_i^T W_{-i} diag(p_ij) W_{-i}^T A_i
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) s += wtw(i, j) * u(j, i);
    scoef[i] = s;
  }

  GradientEstimate g;
  g.G = Matrix(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    const double* wr = W.row(r);
    const double* ar = A.row(r);
    const double* cr = cross.row(r);
    double* gr = g.G.row(r);
    for (std::size_t i = 0; i < m; ++i) {
      gr[i] = -p_single * lambda[i] * ar[i] + p_single * lambda[i] * lambda[i] * wr[i] +
              lambda[i] * cr[i] + scoef[i] * ar[i];
    }
  }
  g.g_b.assign(m, 0.0);  // derived for zero bias; no closed bias form
  g.n_samples = 0;
  return g;
}

GradientEstimate expected_gradient_nonneg(const Matrix& W, const Vector& b, const Matrix& A,
                                          const ModelSpec& spec, double p_single, double p_pair,
                                          double p_triple) {
  if (spec.family != Family::NonNegSparse)
    throw FamilyMismatch("expected_gradient_nonneg: spec family is not NonNegSparse");
  if (W.rows() != A.rows() || W.cols() != A.cols())
    throw DimensionMismatch("expected_gradient_nonneg: W and A shapes differ");
  if (b.size() != W.cols()) throw DimensionMismatch("expected_gradient_nonneg: bias length");
  const std::size_t n = W.rows(), m = W.cols();
  const double k1 = spec.kappa1, k2 = spec.kappa2;

  const Matrix wta = gram_product(W, A);  // wta(j, i) = <W_j, A_i>
  const Matrix wtw = gram_product(W, W);

  Vector alpha(m), beta(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lam = wta(i, i);
    double s1 = 0.0;  // sum_j <W_i, A_j>^2
    double s2 = 0.0;  // sum_j <W_i, A_j>
    double t1 = 0.0;  // sum_j <W_i, W_j><A_i, W_j>
    double t3 = 0.0;  // sum_j <W_i, W_j> lambda_j
    double t4 = 0.0;  // sum_{j != l != i} <W_i, W_j><W_j, A_l>
    double t5 = 0.0;  // sum_j <W_i, W_j>
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double wiaj = wta(i, j);
      s1 += wiaj * wiaj;
      s2 += wiaj;
      const double wiwj = wtw(i, j);
      t1 += wiwj * wta(j, i);
      t3 += wiwj * wta(j, j);
      double row = 0.0;
      for (std::size_t l = 0; l < m; ++l)
        if (l != i && l != j) row += wta(j, l);
      t4 += wiwj * row;
      t5 += wiwj;
    }
    const double s3 = s2 * s2 - s1;  // sum_{j != l != i} <W_i,A_j><W_i,A_l>

    alpha[i] = k2 * p_single * lam * lam + k2 * p_pair * s1 +
               2.0 * k1 * k1 * p_pair * lam * s2 + k1 * k1 * p_triple * s3 +
               2.0 * k1 * p_single * b[i] * lam + 2.0 * k1 * p_pair * b[i] * s2 +
               p_single * b[i] * b[i];
    beta[i] = k2 * p_single * lam - k2 * p_pair * t1 + k1 * k1 * p_pair * s2 -
              k1 * k1 * p_pair * t3 - k1 * k1 * p_triple * t4 - k1 * p_pair * b[i] * t5;
  }

  GradientEstimate g;
  g.G = Matrix(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    const double* wr = W.row(r);
    const double* ar = A.row(r);
    double* gr = g.G.row(r);
    for (std::size_t i = 0; i < m; ++i) gr[i] = alpha[i] * wr[i] - beta[i] * ar[i];
  }
  g.g_b.assign(m, 0.0);
  g.n_samples = 0;
  return g;
}

}  // namespace sae
