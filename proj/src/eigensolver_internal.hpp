#pragma once

#include "steklov/spectral.hpp"

namespace steklov::detail {

/// Shift-invert block subspace iteration for the `k` smallest finite
/// eigenvalues of A x = ρ B x, where A is positive semidefinite and B is
/// positive semidefinite with A + σB positive definite for σ > 0. Vectors are
/// B-orthonormal on the full dof set.
EigenPairs shift_invert_subspace(const SparseMatrix& A, const SparseMatrix& B, Index k,
                                 const SolverOptions& options);

/// Deterministic sign: the largest-magnitude component of each column is made
/// positive.
void normalize_signs(Eigen::MatrixXd& vectors);

}  // namespace steklov::detail
