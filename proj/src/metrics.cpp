#include "sae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sae/spectral.hpp"

namespace sae {

namespace {

bool unit_columns(const Matrix& m, double tol) {
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (std::abs(m.col_norm(c) - 1.0) > tol) return false;
  return true;
}

double pair_distance_sq(const Matrix& w, std::size_t jw, const Matrix& a, std::size_t ja,
                        double sign) {
  double s = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double d = sign * w(r, jw) - a(r, ja);
    s += d * d;
  }
  return s;
}

// Shortest augmenting path assignment (Jonker-Volgonant style potentials).
// cost(i, j) = cost of pairing target row i with source column j.
// Returns perm with perm[i] = assigned j.
std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

}  // namespace

double incoherence(const Matrix& a) {
  for (std::size_t c = 0; c < a.cols(); ++c)
    if (std::abs(a.col_norm(c) - 1.0) > 1e-6)
      throw NotNormalized("incoherence: column " + std::to_string(c) + " is not unit-norm");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      worst = std::max(worst, std::abs(s));
    }
  }
  return std::sqrt(static_cast<double>(a.rows())) * worst;
}

double max_column_distance(const Matrix& w, const Matrix& a) {
  if (w.rows() != a.rows() || w.cols() != a.cols())
    throw ShapeMismatch("max_column_distance: shapes differ");
  double worst = 0.0;
  for (std::size_t c = 0; c < w.cols(); ++c)
    worst = std::max(worst, std::sqrt(pair_distance_sq(w, c, a, c, 1.0)));
  return worst;
}

MatchResult hungarian_match(const Matrix& w, const Matrix& a, bool allow_sign_flip) {
  if (w.rows() != a.rows() || w.cols() != a.cols())
    throw ShapeMismatch("hungarian_match: shapes differ");
  const std::size_t m = w.cols();

  // For unit columns ||s W_j - A_i||^2 = 2 - 2 s <W_j, A_i>, so the cost can
  // be built from inner products; otherwise fall back to explicit distances.
  const bool fast = unit_columns(w, 1e-9) && unit_columns(a, 1e-9);
  Matrix cost(m, m);
  Matrix best_sign(m, m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (fast) {
        double ip = 0.0;
        for (std::size_t r = 0; r < w.rows(); ++r) ip += w(r, j) * a(r, i);
        const double s = (allow_sign_flip && ip < 0.0) ? -1.0 : 1.0;
        cost(i, j) = 2.0 - 2.0 * s * ip;
        best_sign(i, j) = s;
      } else {
        const double plus = pair_distance_sq(w, j, a, i, 1.0);
        if (allow_sign_flip) {
          const double minus = pair_distance_sq(w, j, a, i, -1.0);
          cost(i, j) = std::min(plus, minus);
          best_sign(i, j) = plus <= minus ? 1.0 : -1.0;
        } else {
          cost(i, j) = plus;
        }
      }
    }
  }

  MatchResult res;
  res.permutation = solve_assignment(cost);
  res.signs.resize(m);
  res.per_column_distance.resize(m);
  res.frobenius_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = res.permutation[i];
    res.signs[i] = allow_sign_flip ? best_sign(i, j) : 1.0;
    const double dsq = pair_distance_sq(w, j, a, i, res.signs[i]);
    res.per_column_distance[i] = std::sqrt(dsq);
    res.frobenius_sq += dsq;
  }
  return res;
}

Closeness closeness(const Matrix& w, const Matrix& a, bool allow_sign_flip) {
  Closeness c;
  c.match = hungarian_match(w, a, allow_sign_flip);
  c.delta = 0.0;
  for (double d : c.match.per_column_distance) c.delta = std::max(c.delta, d);
  return c;
}

NearnessResult nearness(const Matrix& w, const Matrix& a, bool allow_sign_flip) {
  NearnessResult out;
  Closeness c = closeness(w, a, allow_sign_flip);
  out.delta = c.delta;
  out.match = std::move(c.match);

  Matrix diff(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.cols(); ++i) {
    const std::size_t j = out.match.permutation[i];
    const double s = out.match.signs[i];
    for (std::size_t r = 0; r < w.rows(); ++r) diff(r, i) = s * w(r, j) - a(r, i);
  }
  const double na = spectral_norm(a);
  out.xi = na > 0.0 ? spectral_norm(diff) / na : 0.0;
  return out;
}

double consistency_rate(const Dictionary& dict, const ModelSpec& spec,
                        const AutoencoderParams& params, std::size_t count, Rng& rng) {
  if (count < 1) throw EmptyBatch();
  const auto samples = sample_batch(dict, spec, count, rng);
  std::size_t good = 0;
  for (const Sample& s : samples) {
    const Encoding e = encode(params, s.y);
    const bool ok = spec.family == Family::SparseCoding ? sign_consistent(e.x, s.code)
                                                        : support_consistent(e.x, s.code);
    good += ok ? 1 : 0;
  }
  return static_cast<double>(good) / static_cast<double>(count);
}

std::vector<ClaimReport> verify_claim_bounds(const Matrix& w, const Matrix& a,
                                             const std::vector<Sample>& samples,
                                             const ModelSpec& spec) {
  if (w.rows() != a.rows() || w.cols() != a.cols())
    throw ShapeMismatch("verify_claim_bounds: shapes differ");
  const std::size_t m = w.cols(), n = w.rows();
  const double delta = max_column_distance(w, a);
  const double mu = incoherence(a);
  const double mu_n = mu / std::sqrt(static_cast<double>(n));
  const double norm_a = spectral_norm(a);
  const Matrix wta = [&] {
    Matrix g(m, m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) g(i, j) += w(r, i) * a(r, j);
    return g;
  }();

  ClaimReport c1{"claim1_i", 0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < m; ++i) {
    const double margin = wta(i, i) - (1.0 - 0.5 * delta * delta);
    ++c1.instances;
    if (margin < -1e-12) ++c1.violations;
    c1.worst_margin = std::min(c1.worst_margin, margin);
  }

  ClaimReport c2{"claim1_ii", 0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double margin = (mu_n + delta) - std::abs(wta(i, j));
      ++c2.instances;
      if (margin < -1e-12) ++c2.violations;
      c2.worst_margin = std::min(c2.worst_margin, margin);
    }
  }

  // Claim 1 (iii) with the proof's explicit constants:
  //   sum_{j in S\{i}} <W_i, A_j>^2 <= 2 mu^2 k / n + 2 ||A||^2 delta^2.
  ClaimReport c3{"claim1_iii", 0, 0, std::numeric_limits<double>::infinity()};
  const double c3_bound = 2.0 * mu * mu * static_cast<double>(spec.k) / static_cast<double>(n) +
                          2.0 * norm_a * norm_a * delta * delta;
  for (const Sample& s : samples) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (const std::size_t j : s.code.support)
        if (j != i) acc += wta(i, j) * wta(i, j);
      const double margin = c3_bound - acc;
      ++c3.instances;
      if (margin < -1e-12) ++c3.violations;
      c3.worst_margin = std::min(c3.worst_margin, margin);
    }
  }

  ClaimReport c4{"claim2", 0, 0, std::numeric_limits<double>::infinity()};
  const double noise_bound = spec.sigma_eta * std::log(static_cast<double>(n));
  for (const Sample& s : samples) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double ip = 0.0;
      for (std::size_t r = 0; r < n; ++r) ip += w(r, i) * s.eta[r];
      worst = std::max(worst, std::abs(ip));
    }
    const double margin = noise_bound - worst;
    ++c4.instances;
    if (margin < 0.0) ++c4.violations;
    c4.worst_margin = std::min(c4.worst_margin, margin);
  }

  return {c1, c2, c3, c4};
}

Vector correlation_margin(const GradientEstimate& g, const Matrix& w, const Matrix& a,
                          const ModelSpec& spec) {
  if (g.n_samples != 0)
    throw FamilyMismatch("correlation_margin: gradient is not a closed-form oracle result");
  if (g.G.rows() != w.rows() || g.G.cols() != w.cols() || w.rows() != a.rows() ||
      w.cols() != a.cols())
    throw ShapeMismatch("correlation_margin: shapes differ");
  const std::size_t m = w.cols(), n = w.rows();
  const double p = spec.p_single();
  const double delta = max_column_distance(w, a);
  const double k2 = spec.kappa2;

  Vector margins(m);
  for (std::size_t i = 0; i < m; ++i) {
    double lam = 0.0, lhs = 0.0, dsq = 0.0, gsq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = w(r, i) - a(r, i);
      lam += w(r, i) * a(r, i);
      lhs += g.G(r, i) * d;
      dsq += d * d;
      gsq += g.G(r, i) * g.G(r, i);
    }
    lhs *= 2.0;
    double rhs = 0.0;
    switch (spec.family) {
      case Family::GMM:
        rhs = p * (lam - 2.0 * delta * delta) * dsq + gsq / (p * lam);
        break;
      case Family::SparseCoding:
        rhs = p * lam * dsq + gsq / (p * lam);
        break;
      case Family::NonNegSparse:
        rhs = k2 * p * (lam - 2.0 * delta * delta) * dsq + gsq / (k2 * p * lam);
        break;
    }
    margins[i] = lhs - rhs;
  }
  return margins;
}

double sc_corr_residual_scale(const ModelSpec& spec, double lambda_i) {
  const double k = static_cast<double>(spec.k), n = static_cast<double>(spec.n);
  return spec.p_single() * k * k / (n * n * lambda_i);
}

double nnsc_corr_residual_scale(const ModelSpec& spec) {
  const double k = static_cast<double>(spec.k), m = static_cast<double>(spec.m);
  const double ratio = spec.kappa1 > 0.0
                           ? std::max(1.0, spec.kappa2 / (spec.kappa1 * spec.kappa1))
                           : 1.0;
  return ratio * k * k / (spec.p_single() * m);
}

double nonneg_remainder_scale(const ModelSpec& spec) {
  const double k = static_cast<double>(spec.k), m = static_cast<double>(spec.m);
  return std::max(spec.kappa1 * spec.kappa1, spec.kappa2 * spec.kappa2) * spec.p_single() * k / m;
}

}  // namespace sae
