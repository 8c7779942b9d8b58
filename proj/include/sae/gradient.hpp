#pragma once

#include <cstddef>

#include "sae/encoder.hpp"
#include "sae/generative.hpp"
#include "sae/matrix.hpp"

namespace sae {

/// Per-column gradient estimate. n_samples >= 1 for Monte Carlo results;
/// n_samples == 0 flags a closed-form oracle value.
struct GradientEstimate {
  Matrix G;       // n x m, column i is g_i
  Vector g_b;     // m bias gradients
  std::size_t n_samples = 0;
};

/// Number of worker threads used by batch reductions. The reduction is a
/// fixed-order pairwise tree keyed by sample index, so the result is
/// bitwise identical for any thread count.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Approximate gradient of the reconstruction loss at a single sample:
///   g_i = -1[x_i != 0] * ( (W_i^T y + b_i) (y - W x) + <W_i, y - W x> y )
/// with the activation derivative replaced by the firing indicator, plus the
/// matching bias gradient (g_b)_i = -1[x_i != 0] <W_i, y - W x>.
GradientEstimate approx_gradient_sample(const AutoencoderParams& params, const Vector& y);

/// Arithmetic mean of approx_gradient_sample over the batch.
GradientEstimate batch_gradient(const AutoencoderParams& params,
                                const std::vector<Sample>& samples);

/// Batch gradient plus the per-batch statistics the trainer records; all
/// three are produced in one pass over the samples.
struct BatchStats {
  GradientEstimate grad;
  double mean_loss = 0.0;
  double support_consistency_rate = 0.0;
};
BatchStats batch_gradient_stats(const AutoencoderParams& params,
                                const std::vector<Sample>& samples);

/// Mean loss and support-consistency rate only (no gradient columns).
struct LossStats {
  double mean_loss = 0.0;
  double support_consistency_rate = 0.0;
};
LossStats batch_loss_stats(const AutoencoderParams& params, const std::vector<Sample>& samples);

// ---- closed-form expected gradients (support-inconsistency residual dropped) ----

/// Mixture of Gaussians, p_i = 1/m:
///   g_i = -p_i lambda_i A_i + p_i (lambda_i^2 + 2 b_i lambda_i + b_i^2) W_i,
///   (g_b)_i = -p_i b_i,  where lambda_i = <W_i, A_i>.
GradientEstimate expected_gradient_gmm(const Matrix& W, const Vector& b, const Matrix& A);

/// General k-sparse coding with zero bias:
///   g_i = -p_i lambda_i A_i + p_i lambda_i^2 W_i
///         + lambda_i W_{-i} diag(p_ij) W_{-i}^T A_i
///         + (W_i^T W_{-i} diag(p_ij) W_{-i}^T A_i) A_i.
GradientEstimate expected_gradient_sparse(const Matrix& W, const Matrix& A, double p_single,
                                          double p_pair);

/// Non-negative k-sparse coding, g_i = alpha_i W_i - beta_i A_i with the
/// full kappa2 / kappa1^2 / bias expansions including the triple-occupancy
/// sums. The unreported remainder e_i is NOT computed; callers must treat
/// the result as exact only up to ||e_i|| = O(max(kappa1^2, kappa2^2) p_i k/m).
GradientEstimate expected_gradient_nonneg(const Matrix& W, const Vector& b, const Matrix& A,
                                          const ModelSpec& spec, double p_single, double p_pair,
                                          double p_triple);

}  // namespace sae
