#pragma once

#include <cmath>
#include <vector>

#include "sae/encoder.hpp"
#include "sae/generative.hpp"
#include "sae/metrics.hpp"
#include "sae/rng.hpp"
#include "sae/trainer.hpp"

namespace helpers {

using namespace sae;

inline Vector random_unit(std::size_t n, Rng& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  const double nv = norm(v);
  for (auto& x : v) x /= nv;
  return v;
}

inline AutoencoderParams params_for(Matrix w, double bias, Activation act, double lambda) {
  AutoencoderParams p;
  p.b.assign(w.cols(), bias);
  p.W = std::move(w);
  p.activation = act;
  p.lambda = lambda;
  return p;
}

/// Dictionary + exactly-delta-close weights in one go.
struct Instance {
  Dictionary dict;
  Matrix w;
};

inline Instance close_instance(const ModelSpec& spec, double delta, std::uint64_t seed,
                               bool orthonormal = false) {
  Instance inst;
  Rng dict_rng(seed, 10);
  inst.dict = orthonormal ? orthonormal_dictionary(spec, dict_rng)
                          : sample_dictionary(spec, dict_rng);
  Rng perturb_rng(seed, 11);
  inst.w = perturb_dictionary_exact(inst.dict.A, delta, perturb_rng);
  return inst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

}  // namespace helpers
