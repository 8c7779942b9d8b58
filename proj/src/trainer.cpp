#include "sae/trainer.hpp"

#include <cmath>

#include "sae/spectral.hpp"

namespace sae {

void TrainConfig::validate() const {
  if (!(zeta > 0.0)) throw InvalidConfig("zeta must be positive");
  if (bias_rule == BiasRule::GeometricDecay) {
    if (!(bias_c > 1.0)) throw InvalidConfig("geometric bias decay requires C > 1");
    if (!(bias_b0 < 0.0)) throw InvalidConfig("geometric bias decay requires b0 < 0");
  }
  if (gradient_source == GradientSource::MonteCarlo && batch_size < 1)
    throw InvalidConfig("Monte Carlo gradients require a positive batch size");
  if (activation == Activation::Threshold && !(threshold > 0.0))
    throw InvalidConfig("threshold activation requires lambda > 0");
}

double TrainConfig::default_zeta(const ModelSpec& spec) {
  const double m = static_cast<double>(spec.m);
  if (spec.family == Family::GMM) return m;
  return m / static_cast<double>(spec.k);
}

AutoencoderParams init_weights(const TrainConfig& config, const Dictionary* dict,
                               const Matrix* data_batch, const ModelSpec& spec, Rng& rng) {
  AutoencoderParams p;
  p.activation = config.activation;
  p.lambda = config.threshold;
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n));

  switch (config.init) {
    case InitScheme::Perturbed: {
      if (dict == nullptr) throw MissingGroundTruth();
      if (config.init_delta == 0.0) {
        p.W = dict->A;
      } else {
        Matrix w = dict->A;
        const Matrix e = gaussian_matrix(spec.n, spec.m, scale, rng);
        add_scaled(w, config.init_delta, e);
        p.W = normalize_columns(w);
      }
      break;
    }
    case InitScheme::PCA: {
      if (data_batch == nullptr) throw MissingData();
      p.W = top_singular_vectors(*data_batch, spec.m).basis;
      break;
    }
    case InitScheme::Random:
      p.W = normalize_columns(gaussian_matrix(spec.n, spec.m, scale, rng));
      break;
  }

  const double b0 = config.bias_rule == BiasRule::GeometricDecay ? config.bias_b0 : 0.0;
  p.b.assign(spec.m, b0);
  return p;
}

AutoencoderParams descent_step(const AutoencoderParams& params, const GradientEstimate& g,
                               double zeta) {
  if (g.G.rows() != params.n() || g.G.cols() != params.m())
    throw DimensionMismatch("descent_step: gradient shape mismatch");
  AutoencoderParams next = params;
  add_scaled(next.W, -zeta, g.G);
  next.W = normalize_columns(next.W);
  return next;
}

Vector bias_step(const Vector& b, BiasRule rule, double c) {
  Vector out(b.size(), 0.0);
  if (rule == BiasRule::GeometricDecay) {
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] / c;
  }
  return out;
}

Matrix perturb_dictionary_exact(const Matrix& a, double delta, Rng& rng) {
  if (!(delta >= 0.0 && delta < 2.0))
    throw InvalidConfig("perturb_dictionary_exact: need 0 <= delta < 2");
  Matrix w = a;
  if (delta == 0.0) return w;
  const double theta = 2.0 * std::asin(0.5 * delta);  // chord -> angle
  const double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    // random unit direction orthogonal to A_j
    Vector u(a.rows());
    for (int attempt = 0; attempt < 16; ++attempt) {
      for (auto& v : u) v = rng.normal();
      double proj = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) proj += u[r] * a(r, j);
      for (std::size_t r = 0; r < a.rows(); ++r) u[r] -= proj * a(r, j);
      const double nu = norm(u);
      if (nu > 1e-8) {
        for (auto& v : u) v /= nu;
        break;
      }
    }
    for (std::size_t r = 0; r < a.rows(); ++r) w(r, j) = c * a(r, j) + s * u[r];
  }
  return w;
}

namespace {

GradientEstimate oracle_gradient(const AutoencoderParams& p, const Dictionary& dict,
                                 const ModelSpec& spec) {
  switch (spec.family) {
    case Family::GMM:
      return expected_gradient_gmm(p.W, p.b, dict.A);
    case Family::SparseCoding:
      return expected_gradient_sparse(p.W, dict.A, spec.p_single(), spec.p_pair());
    case Family::NonNegSparse:
      return expected_gradient_nonneg(p.W, p.b, dict.A, spec, spec.p_single(), spec.p_pair(),
                                      spec.p_triple());
  }
  throw FamilyMismatch("oracle_gradient: unknown family");
}

TraceRow make_row(std::size_t iter, const AutoencoderParams& p, const Dictionary& dict,
                  const ModelSpec& spec, double mean_loss, double consistency,
                  double prev_frob) {
  TraceRow row;
  row.iter = iter;
  row.loss = mean_loss;
  const Closeness c = closeness(p.W, dict.A, spec.family == Family::SparseCoding);
  row.frob_err = c.match.frobenius_sq;
  row.delta = c.delta;
  row.consistency_rate = consistency;
  row.bias_max = 0.0;
  for (double b : p.b) row.bias_max = std::max(row.bias_max, std::abs(b));
  row.contraction = prev_frob > 0.0 ? row.frob_err / prev_frob : 1.0;
  return row;
}

}  // namespace

TrainResult train(const Dictionary& dict, const ModelSpec& spec, const TrainConfig& config) {
  config.validate();
  spec.validate();

  Rng root(config.seed);
  Rng init_rng = root.derive(1);
  Rng batch_rng = root.derive(2);

  const bool oracle = config.gradient_source == GradientSource::ClosedFormOracle;
  const std::size_t eval_size =
      config.eval_batch_size > 0 ? config.eval_batch_size : (oracle ? 2000 : config.batch_size);

  // PCA initialization and fixed-dataset training share the head batch.
  std::vector<Sample> fixed;
  if (!config.fresh_batches || config.init == InitScheme::PCA || oracle) {
    Rng r = batch_rng.derive(0);
    const std::size_t head = oracle ? eval_size : config.batch_size;
    fixed = sample_batch(dict, spec, head, r);
  }

  AutoencoderParams params = [&] {
    if (config.init == InitScheme::PCA) {
      Matrix y(spec.n, fixed.size());
      for (std::size_t j = 0; j < fixed.size(); ++j)
        for (std::size_t r = 0; r < spec.n; ++r) y(r, j) = fixed[j].y[r];
      return init_weights(config, &dict, &y, spec, init_rng);
    }
    return init_weights(config, &dict, nullptr, spec, init_rng);
  }();

  const double norm_a = config.clamp_spectral ? spectral_norm(dict.A) : 0.0;

  TrainResult out;
  out.trace.rows.reserve(config.iters + 1);
  double prev_frob = 0.0;

  for (std::size_t s = 0; s < config.iters; ++s) {
    GradientEstimate grad;
    double mean_loss = 0.0, consistency = 0.0;
    if (oracle) {
      const LossStats stats = batch_loss_stats(params, fixed);
      mean_loss = stats.mean_loss;
      consistency = stats.support_consistency_rate;
      grad = oracle_gradient(params, dict, spec);
    } else if (config.fresh_batches) {
      Rng r = batch_rng.derive(s + 1);
      const auto batch = sample_batch(dict, spec, config.batch_size, r);
      BatchStats stats = batch_gradient_stats(params, batch);
      mean_loss = stats.mean_loss;
      consistency = stats.support_consistency_rate;
      grad = std::move(stats.grad);
    } else {
      BatchStats stats = batch_gradient_stats(params, fixed);
      mean_loss = stats.mean_loss;
      consistency = stats.support_consistency_rate;
      grad = std::move(stats.grad);
    }

    out.trace.rows.push_back(
        make_row(s, params, dict, spec, mean_loss, consistency, s == 0 ? 0.0 : prev_frob));
    prev_frob = out.trace.rows.back().frob_err;

    if (config.clamp_spectral) {
      Matrix w = params.W;
      add_scaled(w, -config.zeta, grad.G);
      const double nw = spectral_norm(w);
      if (nw > 2.0 * norm_a && nw > 0.0) {
        for (auto& v : w.data()) v *= 2.0 * norm_a / nw;
      }
      AutoencoderParams next = params;
      next.W = normalize_columns(w);
      params = std::move(next);
    } else {
      params = descent_step(params, grad, config.zeta);
    }
    params.b = bias_step(params.b, config.bias_rule, config.bias_c);
  }

  // closing row with the final parameters
  double mean_loss = 0.0, consistency = 0.0;
  if (oracle || !config.fresh_batches) {
    const LossStats stats = batch_loss_stats(params, fixed);
    mean_loss = stats.mean_loss;
    consistency = stats.support_consistency_rate;
  } else {
    Rng r = batch_rng.derive(config.iters + 1);
    const auto batch = sample_batch(dict, spec, eval_size, r);
    const LossStats stats = batch_loss_stats(params, batch);
    mean_loss = stats.mean_loss;
    consistency = stats.support_consistency_rate;
  }
  out.trace.rows.push_back(
      make_row(config.iters, params, dict, spec, mean_loss, consistency, prev_frob));

  out.params = std::move(params);
  return out;
}

}  // namespace sae
