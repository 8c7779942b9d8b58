#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sae/encoder.hpp"
#include "sae/generative.hpp"
#include "sae/gradient.hpp"
#include "sae/matrix.hpp"

namespace sae {

/// mu = sqrt(n) * max_{i != j} |<A_i, A_j>|.
/// Throws NotNormalized when a column norm deviates from 1 by more than 1e-6.
double incoherence(const Matrix& a);

/// Max column distance under the identity alignment, max_i ||W_i - A_i||.
double max_column_distance(const Matrix& w, const Matrix& a);

struct MatchResult {
  std::vector<std::size_t> permutation;  // target i is matched to W column permutation[i]
  Vector signs;                          // +-1 per target column; all +1 when flips disabled
  Vector per_column_distance;            // ||signs[i] * W_{perm[i]} - A_i||
  double frobenius_sq = 0.0;             // sum of squared per-column distances
};

/// Exact minimum of sum_i ||sigma_i W_{pi(i)} - A_i||^2 over permutations
/// (and per-pair signs when enabled), via the O(m^3) shortest augmenting
/// path assignment on the pairwise cost matrix.
MatchResult hungarian_match(const Matrix& w, const Matrix& a, bool allow_sign_flip);

struct Closeness {
  double delta = 0.0;  // max per-column distance under the optimal matching
  MatchResult match;
};
Closeness closeness(const Matrix& w, const Matrix& a, bool allow_sign_flip = false);

struct NearnessResult {
  double delta = 0.0;
  double xi = 0.0;  // ||pi(W) - A|| / ||A||, reusing the closeness matching
  MatchResult match;
};
NearnessResult nearness(const Matrix& w, const Matrix& a, bool allow_sign_flip = false);

/// Fraction of N fresh samples whose encoding is consistent with the true
/// code: sign consistency for the sparse-coding family, support consistency
/// otherwise.
double consistency_rate(const Dictionary& dict, const ModelSpec& spec,
                        const AutoencoderParams& params, std::size_t count, Rng& rng);

struct ClaimReport {
  std::string claim_id;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min over instances; >= 0 means the claim held
};

/// Deterministic cross-product bounds (claim ids claim1_i .. claim1_iii) and
/// the high-probability noise bound max_i |<W_i, eta>| <= sigma_eta ln n
/// (claim2), evaluated per sample. claim2 tolerates a small failure
/// fraction by design; the others should report zero violations.
std::vector<ClaimReport> verify_claim_bounds(const Matrix& w, const Matrix& a,
                                             const std::vector<Sample>& samples,
                                             const ModelSpec& spec);

/// Per-column correlation-lemma slack 2<g_i, W_i - A_i> - RHS_core for the
/// family's inequality, where RHS_core carries no residual allowance:
///   GMM:     p (lambda_i - 2 delta^2) ||W_i-A_i||^2 + ||g_i||^2 / (p lambda_i)
///   sparse:  p lambda_i ||W_i-A_i||^2 + ||g_i||^2 / (p lambda_i)
///   nonneg:  kappa2 p (lambda_i - 2 delta^2) ||W_i-A_i||^2
///            + ||g_i||^2 / (kappa2 p lambda_i)
/// Callers compare against the documented residual budgets below. W and A
/// must be identity-aligned; g must come from the matching closed-form
/// oracle (n_samples == 0), otherwise FamilyMismatch is thrown.
Vector correlation_margin(const GradientEstimate& g, const Matrix& w, const Matrix& a,
                          const ModelSpec& spec);

/// Residual scale of the sparse-coding lemma: p_i k^2 / (n^2 lambda_i).
double sc_corr_residual_scale(const ModelSpec& spec, double lambda_i);

/// Residual scale of the non-negative lemma: max(1, kappa2/kappa1^2) k^2 / (p_i m).
double nnsc_corr_residual_scale(const ModelSpec& spec);

/// Scale of the uncomputed remainder in the non-negative oracle:
/// max(kappa1^2, kappa2^2) p_i k / m.
double nonneg_remainder_scale(const ModelSpec& spec);

}  // namespace sae
