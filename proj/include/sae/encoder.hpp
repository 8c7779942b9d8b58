#pragma once

#include <cstddef>

#include "sae/generative.hpp"
#include "sae/matrix.hpp"

namespace sae {

enum class Activation { ReLU, Threshold };

struct AutoencoderParams {
  Matrix W;      // n x m, unit columns after any training step
  Vector b;      // m biases
  Activation activation = Activation::ReLU;
  double lambda = 0.5;  // hard-threshold level, used when activation == Threshold

  std::size_t n() const { return W.rows(); }
  std::size_t m() const { return W.cols(); }
};

struct Encoding {
  Vector z;  // pre-activation W^T y + b
  Vector x;  // activated code
};

inline double apply_activation(Activation act, double lambda, double z) {
  if (act == Activation::ReLU) return z > 0.0 ? z : 0.0;
  // boundary |z| == lambda fires
  return std::abs(z) >= lambda ? z : 0.0;
}

Encoding encode(const AutoencoderParams& params, const Vector& y);

Vector decode(const AutoencoderParams& params, const Vector& x);

/// (1/2) || y - decode(encode(y).x) ||^2
double loss(const AutoencoderParams& params, const Vector& y);

/// True iff {i : x_i != 0} equals the code support. Exact floating-point
/// zero test; the activations produce exact zeros.
bool support_consistent(const Vector& x, const LatentCode& code);

/// True iff entrywise sign of x equals the sign of the densified code.
bool sign_consistent(const Vector& x, const LatentCode& code);

// ---- bias prescriptions behind the consistency guarantees ----

/// Threshold level for the sparse families: a1/2.
inline double threshold_level(double a1) { return 0.5 * a1; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint() const { return 0.5 * (lo + hi); }
  /// t=0 gives hi, t=1 gives lo.
  double blend(double t) const { return (1.0 - t) * hi + t * lo; }
};

/// ReLU bias range for the non-negative k-sparse model:
/// [-(1-delta) a1 + a2 delta sqrt(k), -a2 delta sqrt(k)].
Interval relu_bias_interval(double a1, double a2, double delta, std::size_t k);

/// ReLU bias range for the Gaussian-mixture special case: [-1+2 delta, -2 delta].
Interval gmm_relu_bias_interval(double delta);

/// Working bias for ReLU consistency runs: the family's interval blended
/// 70% toward its negative endpoint, which clears both firing margins at
/// desk scale while staying inside the prescribed range.
double theorem_relu_bias(const ModelSpec& spec, double delta);

}  // namespace sae
