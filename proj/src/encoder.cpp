#include "sae/encoder.hpp"

#include <cmath>

namespace sae {

Encoding encode(const AutoencoderParams& params, const Vector& y) {
  if (y.size() != params.n()) throw DimensionMismatch("encode: y has wrong length");
  if (params.b.size() != params.m()) throw DimensionMismatch("encode: bias has wrong length");
  Encoding e;
  e.z = tmatvec(params.W, y);
  for (std::size_t i = 0; i < e.z.size(); ++i) e.z[i] += params.b[i];
  e.x.resize(e.z.size());
  for (std::size_t i = 0; i < e.z.size(); ++i)
    e.x[i] = apply_activation(params.activation, params.lambda, e.z[i]);
  return e;
}

Vector decode(const AutoencoderParams& params, const Vector& x) {
  if (x.size() != params.m()) throw DimensionMismatch("decode: x has wrong length");
  return matvec(params.W, x);
}

double loss(const AutoencoderParams& params, const Vector& y) {
  const Encoding e = encode(params, y);
  const Vector yhat = decode(params, e.x);
  double s = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double d = y[r] - yhat[r];
    s += d * d;
  }
  return 0.5 * s;
}

bool support_consistent(const Vector& x, const LatentCode& code) {
  std::size_t t = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool active = x[i] != 0.0;
    const bool expected = t < code.support.size() && code.support[t] == i;
    if (active != expected) return false;
    if (expected) ++t;
  }
  return t == code.support.size();
}

bool sign_consistent(const Vector& x, const LatentCode& code) {
  std::size_t t = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double expected = 0.0;
    if (t < code.support.size() && code.support[t] == i) {
      expected = code.values[t];
      ++t;
    }
    const int sx = x[i] > 0.0 ? 1 : (x[i] < 0.0 ? -1 : 0);
    const int se = expected > 0.0 ? 1 : (expected < 0.0 ? -1 : 0);
    if (sx != se) return false;
  }
  return true;
}

Interval relu_bias_interval(double a1, double a2, double delta, std::size_t k) {
  const double edge = a2 * delta * std::sqrt(static_cast<double>(k));
  return {-(1.0 - delta) * a1 + edge, -edge};
}

Interval gmm_relu_bias_interval(double delta) { return {-1.0 + 2.0 * delta, -2.0 * delta}; }

double theorem_relu_bias(const ModelSpec& spec, double delta) {
  const Interval iv = spec.family == Family::GMM
                          ? gmm_relu_bias_interval(delta)
                          : relu_bias_interval(spec.a1, spec.a2, delta, spec.k);
  return iv.blend(0.7);
}

}  // namespace sae
