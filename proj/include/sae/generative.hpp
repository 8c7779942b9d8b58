#pragma once

#include <cstddef>
#include <vector>

#include "sae/matrix.hpp"
#include "sae/rng.hpp"

namespace sae {

enum class Family { GMM, SparseCoding, NonNegSparse };

/// Law of the nonzero magnitudes in the k-sparse model. Rademacher +-1
/// satisfies the zero-mean / unit-second-moment standardization exactly;
/// SignedUniform draws sign * Uniform[a1, b] with b solved so the second
/// moment is still 1.
enum class SparseValueLaw { Rademacher, SignedUniform };

struct ModelSpec {
  Family family = Family::GMM;
  std::size_t n = 0;  // ambient dimension
  std::size_t m = 0;  // code dimension
  std::size_t k = 1;  // sparsity
  double kappa1 = 1.0;  // conditional mean of a nonzero entry
  double kappa2 = 1.0;  // conditional second moment
  double a1 = 1.0;      // lower magnitude bound
  double a2 = 1.0;      // upper magnitude bound
  double sigma_eta = 0.0;
  SparseValueLaw sparse_law = SparseValueLaw::Rademacher;

  static ModelSpec gmm(std::size_t n, std::size_t m, double sigma_eta);
  static ModelSpec sparse_coding(std::size_t n, std::size_t m, std::size_t k, double sigma_eta);
  static ModelSpec sparse_coding_uniform(std::size_t n, std::size_t m, std::size_t k, double a1,
                                         double sigma_eta);
  static ModelSpec nonneg_sparse(std::size_t n, std::size_t m, std::size_t k, double a1,
                                 double a2, double sigma_eta);

  /// Throws InvalidModel when the family constraints are violated.
  void validate() const;

  // Support inclusion probabilities under the uniform size-k subset law.
  double p_single() const { return static_cast<double>(k) / static_cast<double>(m); }
  double p_pair() const;
  double p_triple() const;
};

/// Ground-truth matrix with unit columns and its measured incoherence
/// mu = sqrt(n) * max_{i!=j} |<A_i, A_j>|.
struct Dictionary {
  Matrix A;
  double mu = 0.0;
};

struct LatentCode {
  std::vector<std::size_t> support;  // strictly increasing, in [0, m)
  std::vector<double> values;        // aligned with support

  Vector dense(std::size_t m) const {
    Vector x(m, 0.0);
    for (std::size_t t = 0; t < support.size(); ++t) x[support[t]] = values[t];
    return x;
  }
};

struct Sample {
  Vector y;
  LatentCode code;
  Vector eta;  // retained so noise bounds can be checked downstream
};

/// Gaussian columns at scale 1/sqrt(n), then column-normalized.
Dictionary sample_dictionary(const ModelSpec& spec, Rng& rng);

/// Override hook: random orthonormal columns (mu = 0), for instances that
/// must sit inside an incoherence bound a raw Gaussian draw would violate.
Dictionary orthonormal_dictionary(const ModelSpec& spec, Rng& rng);

Dictionary make_dictionary(Matrix a);

LatentCode sample_code(const ModelSpec& spec, Rng& rng);

/// N independent samples y = A x* + eta. Sample i is produced from the
/// child stream derive(i) of a stream split off `rng`, so batches are
/// reproducible and may be sharded by sample index.
std::vector<Sample> sample_batch(const Dictionary& dict, const ModelSpec& spec, std::size_t count,
                                 Rng& rng);

}  // namespace sae
