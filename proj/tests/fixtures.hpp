#pragma once

// Frozen residual-budget constants for the order-only bounds. Fitted once
// on calibration runs (seeds disjoint from the test seeds below) and kept
// fixed; see test_gradient.cpp / test_trainer.cpp for the inequalities
// they feed.

namespace fixtures {

// sc_corr lemma residual: margin >= -kSparseCorr * p_i k^2 / (n^2 lambda_i)
inline constexpr double kSparseCorr = 8.0;

// nnsc_corr lemma residual:
// margin >= -kNonNegCorr * max(1, kappa2/kappa1^2) k^2 / (p_i m)
inline constexpr double kNonNegCorr = 0.05;

// Non-negative oracle remainder:
// ||mc - oracle||_col <= 5 SE + kNonNegRemainder * max(k1^2,k2^2) p_i k / m
inline constexpr double kNonNegRemainder = 2.0;

}  // namespace fixtures
