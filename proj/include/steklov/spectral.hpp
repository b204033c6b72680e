#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "steklov/fem.hpp"

namespace steklov {

struct EigenPairs {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< columns, B-orthonormal
};

/// Smallest `k` eigenpairs of the dense symmetric pencil A u = ρ B u with B
/// positive definite. Throws a numerical error ("no_convergence") listing the
/// residual norms when any returned pair misses ‖Au − ρBu‖ ≤ 1e-9 (‖A‖ + |ρ|‖B‖).
EigenPairs solve_dense_gevp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Index k);
EigenPairs solve_dense_gevp(const SparseSymMatrix& A, const SparseSymMatrix& B, Index k);

struct SolverOptions {
    /// Boundary sizes up to this use the dense Schur complement; larger ones
    /// use shift-invert subspace iteration on the full pencil.
    Index dense_threshold = 2000;
    double tolerance = 1e-10;  ///< relative residual for the iterative path
    int max_iterations = 1000;
};

/// Eigenvalues ρ_0 ≤ ρ_1 ≤ … of the boundary-reduced pencil S(c) u = ρ B_bb u,
/// with S(c) the Schur complement of A = K + cM onto the boundary dofs.
/// Eigenvectors are boundary traces of discrete (modified-)harmonic
/// extensions, B_bb-orthonormal. At c = 0 the zero eigenvalue (constants) is
/// kept at index 0.
struct SpectrumSlice {
    double c = 0.0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

SpectrumSlice robin_steklov_spectrum(const AssembledForms& forms, double c, Index k,
                                     const SolverOptions& options = {});

/// Dirichlet-to-Neumann spectrum, i.e. robin_steklov_spectrum at c = 0.
SpectrumSlice steklov_spectrum(const AssembledForms& forms, Index k, const SolverOptions& options = {});

/// Smallest eigenvalues at bulk coefficient c, computed in growing batches
/// until one exceeds `threshold` (that one is included) or every boundary
/// branch is known.
Eigen::VectorXd eigenvalues_up_to(const AssembledForms& forms, double c, double threshold,
                                  const SolverOptions& options = {});

/// Samples of t ↦ ρ^{(i)}_j(t): the j-th smallest eigenvalue at c = t·rho_i.
struct EigenCurve {
    int factor_index = 0;
    int branch_index = 0;
    std::vector<std::pair<double, double>> samples;
};

EigenCurve trace_eigencurve(const AssembledForms& forms, double rho_i, int j, const std::vector<double>& t_grid,
                            int factor_index = 0, const SolverOptions& options = {});

/// Full-dof vector with the given boundary values whose interior rows of
/// (K + cM)·u vanish.
Eigen::VectorXd harmonic_extension(const AssembledForms& forms, const Eigen::VectorXd& boundary_values,
                                   double c = 0.0);

/// Equality test used for nondegeneracy checks: |value − target| ≤ 1e-8 max(1, |target|).
bool spectrally_equal(double value, double target);

/// True when `target` equals one of the Steklov eigenvalues of the forms.
bool is_steklov_eigenvalue(const AssembledForms& forms, double target, const SolverOptions& options = {});

/// Smallest C with ∫ φ² ≤ C (∫ |∇φ|² + ∫_∂ φ²) over the discrete space, the
/// largest eigenvalue of the pencil (M, K + B).
double trace_inequality_constant(const AssembledForms& forms);

}  // namespace steklov
