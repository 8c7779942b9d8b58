#pragma once

#include <cstddef>
#include <vector>

#include "sae/matrix.hpp"

namespace sae {

class Rng;

/// Matrix with i.i.d. N(0, scale^2) entries, filled row by row.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng);

struct EighResult {
  Vector values;   // descending
  Matrix vectors;  // eigenvectors as columns, matching `values`
};

/// Symmetric eigendecomposition by cyclic Jacobi sweeps.
EighResult sym_eigh(const Matrix& s, double tol = 1e-14, std::size_t max_sweeps = 64);

struct SubspaceResult {
  Matrix basis;                  // orthonormal columns, top subspace
  Vector singular_values;        // descending
  bool converged = true;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Orthonormal basis of the top-m left singular subspace of Y, via
/// orthogonal iteration on the smaller of Y*Y^T and Y^T*Y followed by a
/// Rayleigh-Ritz rotation. On failure to reach `tol` the best iterate is
/// returned with converged=false.
SubspaceResult top_singular_vectors(const Matrix& y, std::size_t m,
                                    std::size_t max_iters = 2000, double tol = 1e-12);

/// Largest singular value by power iteration on the smaller Gram matrix.
/// Zero matrices return 0.
double spectral_norm(const Matrix& m, double tol = 1e-13);

}  // namespace sae
