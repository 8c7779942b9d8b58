#include "sae/generative.hpp"

#include <algorithm>
#include <cmath>

#include "sae/metrics.hpp"
#include "sae/spectral.hpp"

namespace sae {

ModelSpec ModelSpec::gmm(std::size_t n, std::size_t m, double sigma_eta) {
  ModelSpec s;
  s.family = Family::GMM;
  s.n = n;
  s.m = m;
  s.k = 1;
  s.kappa1 = s.kappa2 = s.a1 = s.a2 = 1.0;
  s.sigma_eta = sigma_eta;
  s.validate();
  return s;
}

ModelSpec ModelSpec::sparse_coding(std::size_t n, std::size_t m, std::size_t k,
                                   double sigma_eta) {
  ModelSpec s;
  s.family = Family::SparseCoding;
  s.n = n;
  s.m = m;
  s.k = k;
  s.kappa1 = 0.0;
  s.kappa2 = 1.0;
  s.a1 = 1.0;
  s.a2 = 1.0;
  s.sigma_eta = sigma_eta;
  s.sparse_law = SparseValueLaw::Rademacher;
  s.validate();
  return s;
}

ModelSpec ModelSpec::sparse_coding_uniform(std::size_t n, std::size_t m, std::size_t k,
                                           double a1, double sigma_eta) {
  if (!(a1 > 0.0 && a1 < 1.0))
    throw InvalidModel("sparse_coding_uniform: need 0 < a1 < 1");
  ModelSpec s;
  s.family = Family::SparseCoding;
  s.n = n;
  s.m = m;
  s.k = k;
  s.kappa1 = 0.0;
  s.kappa2 = 1.0;
  s.a1 = a1;
  // Magnitudes Uniform[a1, b]; solve (a1^2 + a1 b + b^2)/3 = 1 for b.
  s.a2 = 0.5 * (-a1 + std::sqrt(12.0 - 3.0 * a1 * a1));
  s.sigma_eta = sigma_eta;
  s.sparse_law = SparseValueLaw::SignedUniform;
  s.validate();
  return s;
}

ModelSpec ModelSpec::nonneg_sparse(std::size_t n, std::size_t m, std::size_t k, double a1,
                                   double a2, double sigma_eta) {
  ModelSpec s;
  s.family = Family::NonNegSparse;
  s.n = n;
  s.m = m;
  s.k = k;
  s.a1 = a1;
  s.a2 = a2;
  // Uniform[a1, a2] magnitudes.
  s.kappa1 = 0.5 * (a1 + a2);
  s.kappa2 = (a1 * a1 + a1 * a2 + a2 * a2) / 3.0;
  s.sigma_eta = sigma_eta;
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  if (n < 1 || m < 1) throw InvalidModel("dimensions must be positive");
  if (k < 1 || k > m) throw InvalidModel("need 1 <= k <= m");
  if (sigma_eta < 0.0) throw InvalidModel("sigma_eta must be nonnegative");
  switch (family) {
    case Family::GMM:
      if (k != 1 || kappa1 != 1.0 || kappa2 != 1.0 || a1 != 1.0 || a2 != 1.0)
        throw InvalidModel("GMM requires k=1 and kappa1=kappa2=a1=a2=1");
      break;
    case Family::SparseCoding:
      if (kappa1 != 0.0 || kappa2 != 1.0)
        throw InvalidModel("sparse coding requires kappa1=0, kappa2=1");
      if (!(a1 > 0.0 && a1 <= 1.0)) throw InvalidModel("sparse coding requires 0 < a1 <= 1");
      break;
    case Family::NonNegSparse:
      if (!(a1 > 0.0 && a1 <= a2 && std::isfinite(a2)))
        throw InvalidModel("non-negative sparse requires 0 < a1 <= a2 < inf");
      break;
  }
}

double ModelSpec::p_pair() const {
  if (m < 2) return 0.0;
  const double kk = static_cast<double>(k), mm = static_cast<double>(m);
  return kk * (kk - 1.0) / (mm * (mm - 1.0));
}

double ModelSpec::p_triple() const {
  if (m < 3) return 0.0;
  const double kk = static_cast<double>(k), mm = static_cast<double>(m);
  return kk * (kk - 1.0) * (kk - 2.0) / (mm * (mm - 1.0) * (mm - 2.0));
}

Dictionary make_dictionary(Matrix a) {
  Dictionary d;
  d.A = std::move(a);
  d.mu = incoherence(d.A);
  return d;
}

Dictionary sample_dictionary(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n));
  Matrix a = gaussian_matrix(spec.n, spec.m, scale, rng);
  return make_dictionary(normalize_columns(a));
}

Dictionary orthonormal_dictionary(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.m > spec.n)
    throw InvalidModel("orthonormal_dictionary: needs m <= n");
  Matrix a = gaussian_matrix(spec.n, spec.m, 1.0, rng);
  // Modified Gram-Schmidt, two passes.
  for (std::size_t c = 0; c < spec.m; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double proj = 0.0;
        for (std::size_t r = 0; r < spec.n; ++r) proj += a(r, p) * a(r, c);
        for (std::size_t r = 0; r < spec.n; ++r) a(r, c) -= proj * a(r, p);
      }
    }
    const double nc = a.col_norm(c);
    if (nc < 1e-12) throw ZeroColumn(c);
    a.scale_col(c, 1.0 / nc);
  }
  return make_dictionary(std::move(a));
}

namespace {

std::vector<std::size_t> uniform_subset(std::size_t m, std::size_t k, Rng& rng) {
  // Partial Fisher-Yates on [0, m); first k slots form a uniform subset.
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(m - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

LatentCode sample_code(const ModelSpec& spec, Rng& rng) {
  LatentCode code;
  switch (spec.family) {
    case Family::GMM:
      code.support = {rng.uniform_index(spec.m)};
      code.values = {1.0};
      break;
    case Family::SparseCoding: {
      code.support = uniform_subset(spec.m, spec.k, rng);
      code.values.resize(spec.k);
      for (auto& v : code.values) {
        const double sign = (rng.next_u64() >> 63) ? 1.0 : -1.0;
        v = spec.sparse_law == SparseValueLaw::Rademacher
                ? sign
                : sign * rng.uniform(spec.a1, spec.a2);
      }
      break;
    }
    case Family::NonNegSparse:
      code.support = uniform_subset(spec.m, spec.k, rng);
      code.values.resize(spec.k);
      for (auto& v : code.values) v = rng.uniform(spec.a1, spec.a2);
      break;
  }
  return code;
}

std::vector<Sample> sample_batch(const Dictionary& dict, const ModelSpec& spec,
                                 std::size_t count, Rng& rng) {
  if (count < 1) throw EmptyBatch();
  if (dict.A.rows() != spec.n || dict.A.cols() != spec.m)
    throw DimensionMismatch("sample_batch: dictionary shape does not match spec");
  Rng root = rng.split();
  std::vector<Sample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng sub = root.derive(i);
    Sample& s = out[i];
    s.code = sample_code(spec, sub);
    s.y.assign(spec.n, 0.0);
    for (std::size_t t = 0; t < s.code.support.size(); ++t) {
      const std::size_t j = s.code.support[t];
      const double v = s.code.values[t];
      for (std::size_t r = 0; r < spec.n; ++r) s.y[r] += v * dict.A(r, j);
    }
    if (spec.sigma_eta > 0.0) {
      s.eta.resize(spec.n);
      for (std::size_t r = 0; r < spec.n; ++r) {
        s.eta[r] = spec.sigma_eta * sub.normal();
        s.y[r] += s.eta[r];
      }
    } else {
      s.eta.assign(spec.n, 0.0);
    }
  }
  return out;
}

}  // namespace sae
