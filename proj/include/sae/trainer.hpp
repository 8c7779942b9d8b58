#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sae/encoder.hpp"
#include "sae/generative.hpp"
#include "sae/gradient.hpp"
#include "sae/metrics.hpp"

namespace sae {

enum class BiasRule { ZeroBias, GeometricDecay };
enum class InitScheme { Perturbed, PCA, Random };
enum class GradientSource { MonteCarlo, ClosedFormOracle };

struct TrainConfig {
  double zeta = 1.0;       // learning rate
  std::size_t iters = 50;  // T; 0 returns the initialization with one trace row

  BiasRule bias_rule = BiasRule::ZeroBias;
  double bias_c = 2.0;    // decay divisor, GeometricDecay only
  double bias_b0 = 0.0;   // initial bias, GeometricDecay only (must be < 0)

  InitScheme init = InitScheme::Perturbed;
  double init_delta = 0.5;

  GradientSource gradient_source = GradientSource::MonteCarlo;
  std::size_t batch_size = 10000;
  bool fresh_batches = true;          // false reuses one fixed dataset
  std::size_t eval_batch_size = 0;    // 0: batch_size (MC) / 2000 (oracle)

  Activation activation = Activation::ReLU;
  double threshold = 0.5;

  std::uint64_t seed = 0;
  bool clamp_spectral = false;  // optional ||W|| <= 2||A|| projection

  void validate() const;

  /// Default learning rate: m for the Gaussian mixture, m/k for the sparse
  /// families.
  static double default_zeta(const ModelSpec& spec);
};

struct TraceRow {
  std::size_t iter = 0;
  double loss = 0.0;
  double frob_err = 0.0;          // matched ||W - A||_F^2
  double delta = 0.0;             // matched closeness
  double consistency_rate = 0.0;  // support consistency over the batch
  double bias_max = 0.0;          // max_i |b_i|
  double contraction = 1.0;       // frob_err ratio vs previous row
};

struct TrainTrace {
  std::vector<TraceRow> rows;  // iters + 1 rows, including iteration 0
};

struct TrainResult {
  AutoencoderParams params;
  TrainTrace trace;
};

/// Initial weights. Perturbed needs the ground-truth dictionary, PCA needs
/// a data batch (samples as columns of an n x N matrix).
AutoencoderParams init_weights(const TrainConfig& config, const Dictionary* dict,
                               const Matrix* data_batch, const ModelSpec& spec, Rng& rng);

/// W <- normalize_columns(W - zeta G); the bias is left untouched.
AutoencoderParams descent_step(const AutoencoderParams& params, const GradientEstimate& g,
                               double zeta);

Vector bias_step(const Vector& b, BiasRule rule, double c);

/// Exactly-delta column perturbation: each column of the result is A_i
/// rotated by the angle whose chord is delta, within the plane spanned by
/// A_i and a random direction. Used by theorem-regime tests that need the
/// closeness pinned rather than approximate.
Matrix perturb_dictionary_exact(const Matrix& a, double delta, Rng& rng);

TrainResult train(const Dictionary& dict, const ModelSpec& spec, const TrainConfig& config);

}  // namespace sae
