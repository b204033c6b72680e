#include "steklov/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "eigensolver_internal.hpp"
#include "steklov/errors.hpp"

namespace steklov {

namespace {

// Submatrix A(rows, cols).
SparseMatrix sparse_block(const SparseMatrix& A, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    std::vector<Index> col_pos(static_cast<std::size_t>(A.cols()), -1);
    for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<Index>(j);
    std::vector<Index> row_pos(static_cast<std::size_t>(A.rows()), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_pos[static_cast<std::size_t>(rows[i])] = static_cast<Index>(i);

    std::vector<Eigen::Triplet<double>> triplets;
    for (Index j = 0; j < A.outerSize(); ++j) {
        const Index cj = col_pos[static_cast<std::size_t>(j)];
        if (cj < 0) continue;
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
            const Index ri = row_pos[static_cast<std::size_t>(it.row())];
            if (ri >= 0) triplets.emplace_back(ri, cj, it.value());
        }
    }
    SparseMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

SpectrumSlice dense_schur_spectrum(const AssembledForms& forms, const SparseMatrix& A, double c, Index k) {
    const auto& bdofs = forms.boundary_dofs;
    const auto& idofs = forms.interior_dofs;
    Eigen::MatrixXd S = Eigen::MatrixXd(sparse_block(A, bdofs, bdofs));
    if (!idofs.empty()) {
        const SparseMatrix A_ii = sparse_block(A, idofs, idofs);
        const SparseMatrix A_ib = sparse_block(A, idofs, bdofs);
        Eigen::SimplicialLLT<SparseMatrix> factor(A_ii);
        if (factor.info() != Eigen::Success) {
            throw numerical_error("singular_interior_block",
                                  "interior block of K + cM is not positive definite (c = " + std::to_string(c) + ")");
        }
        const Eigen::MatrixXd X = factor.solve(Eigen::MatrixXd(A_ib));
        S -= Eigen::MatrixXd(A_ib.transpose()) * X;
    }
    S = 0.5 * (S + S.transpose()).eval();
    const Eigen::MatrixXd B_bb = Eigen::MatrixXd(sparse_block(forms.B.to_sparse(), bdofs, bdofs));
    EigenPairs pairs = solve_dense_gevp(S, B_bb, k);
    return SpectrumSlice{c, std::move(pairs.values), std::move(pairs.vectors)};
}

SpectrumSlice iterative_spectrum(const AssembledForms& forms, const SparseMatrix& A, double c, Index k,
                                 const SolverOptions& options) {
    EigenPairs pairs = detail::shift_invert_subspace(A, forms.B.to_sparse(), k, options);
    Eigen::MatrixXd traces(static_cast<Index>(forms.boundary_dofs.size()), k);
    for (std::size_t r = 0; r < forms.boundary_dofs.size(); ++r) {
        traces.row(static_cast<Index>(r)) = pairs.vectors.row(forms.boundary_dofs[r]);
    }
    detail::normalize_signs(traces);
    return SpectrumSlice{c, std::move(pairs.values), std::move(traces)};
}

}  // namespace

SpectrumSlice robin_steklov_spectrum(const AssembledForms& forms, double c, Index k, const SolverOptions& options) {
    if (!(c >= 0.0)) throw precondition_error("invalid_argument", "bulk coefficient c must be non-negative");
    const Index nb = static_cast<Index>(forms.boundary_dofs.size());
    if (nb == 0) throw precondition_error("invalid_argument", "mesh has no boundary dofs");
    if (k < 1 || k > nb) {
        throw precondition_error("k_exceeds_boundary_dofs", "requested " + std::to_string(k) +
                                                                " eigenvalues but there are " + std::to_string(nb) +
                                                                " boundary dofs");
    }
    const SparseMatrix A = c == 0.0 ? forms.K.to_sparse() : SparseMatrix(forms.K.to_sparse() + c * forms.M.to_sparse());
    if (nb <= options.dense_threshold) return dense_schur_spectrum(forms, A, c, k);
    return iterative_spectrum(forms, A, c, k, options);
}

SpectrumSlice steklov_spectrum(const AssembledForms& forms, Index k, const SolverOptions& options) {
    return robin_steklov_spectrum(forms, 0.0, k, options);
}

Eigen::VectorXd eigenvalues_up_to(const AssembledForms& forms, double c, double threshold,
                                  const SolverOptions& options) {
    const Index nb = static_cast<Index>(forms.boundary_dofs.size());
    Index k = std::min<Index>(nb, 8);
    while (true) {
        SpectrumSlice slice = robin_steklov_spectrum(forms, c, k, options);
        if (k == nb || slice.eigenvalues(k - 1) > threshold) return std::move(slice.eigenvalues);
        k = std::min(nb, 2 * k);
    }
}

EigenCurve trace_eigencurve(const AssembledForms& forms, double rho_i, int j, const std::vector<double>& t_grid,
                            int factor_index, const SolverOptions& options) {
    if (t_grid.empty()) throw precondition_error("invalid_argument", "t grid is empty");
    if (!(rho_i >= 0.0)) throw precondition_error("invalid_argument", "closed-factor eigenvalue must be non-negative");
    if (j < 0) throw precondition_error("invalid_argument", "branch index must be non-negative");
    for (std::size_t n = 0; n < t_grid.size(); ++n) {
        if (!(t_grid[n] > 0.0) || (n > 0 && !(t_grid[n] > t_grid[n - 1]))) {
            throw precondition_error("invalid_argument", "t grid must be positive and strictly ascending");
        }
    }
    EigenCurve curve;
    curve.factor_index = factor_index;
    curve.branch_index = j;
    curve.samples.reserve(t_grid.size());
    for (double t : t_grid) {
        const SpectrumSlice slice = robin_steklov_spectrum(forms, t * rho_i, j + 1, options);
        curve.samples.emplace_back(t, slice.eigenvalues(j));
    }
    return curve;
}

Eigen::VectorXd harmonic_extension(const AssembledForms& forms, const Eigen::VectorXd& boundary_values, double c) {
    const auto& bdofs = forms.boundary_dofs;
    const auto& idofs = forms.interior_dofs;
    if (boundary_values.size() != static_cast<Index>(bdofs.size())) {
        throw precondition_error("invalid_argument", "boundary vector size does not match the boundary dofs");
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(forms.num_dofs());
    for (std::size_t r = 0; r < bdofs.size(); ++r) u(bdofs[r]) = boundary_values(static_cast<Index>(r));
    if (idofs.empty()) return u;
    const SparseMatrix A = c == 0.0 ? forms.K.to_sparse() : SparseMatrix(forms.K.to_sparse() + c * forms.M.to_sparse());
    Eigen::SimplicialLLT<SparseMatrix> factor(sparse_block(A, idofs, idofs));
    if (factor.info() != Eigen::Success) {
        throw numerical_error("singular_interior_block", "interior block is not positive definite");
    }
    const Eigen::VectorXd rhs = -(sparse_block(A, idofs, bdofs) * boundary_values);
    const Eigen::VectorXd interior = factor.solve(rhs);
    for (std::size_t r = 0; r < idofs.size(); ++r) u(idofs[r]) = interior(static_cast<Index>(r));
    return u;
}

bool spectrally_equal(double value, double target) {
    return std::abs(value - target) <= 1e-8 * std::max(1.0, std::abs(target));
}

bool is_steklov_eigenvalue(const AssembledForms& forms, double target, const SolverOptions& options) {
    const Eigen::VectorXd values = eigenvalues_up_to(forms, 0.0, target + 1e-8 * std::max(1.0, std::abs(target)),
                                                     options);
    for (Index j = 0; j < values.size(); ++j) {
        if (spectrally_equal(values(j), target)) return true;
    }
    return false;
}

double trace_inequality_constant(const AssembledForms& forms) {
    const SparseMatrix KB = forms.K.to_sparse() + forms.B.to_sparse();
    const SparseMatrix M = forms.M.to_sparse();
    if (forms.num_dofs() <= 3000) {
        // largest eigenvalue of M x = C (K + B) x
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(M), Eigen::MatrixXd(KB),
                                                                          Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw numerical_error("no_convergence", "trace constant solve failed");
        return solver.eigenvalues().maxCoeff();
    }
    Eigen::SimplicialLLT<SparseMatrix> factor(KB);
    if (factor.info() != Eigen::Success) throw numerical_error("singular_interior_block", "K + B not definite");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(forms.num_dofs());
    double estimate = 0.0;
    for (int it = 0; it < 100000; ++it) {
        const Eigen::VectorXd y = factor.solve(M * x);
        const double next = x.dot(M * x) / x.dot(KB * x);
        x = y / y.norm();
        if (std::abs(next - estimate) <= 1e-13 * next) return next;
        estimate = next;
    }
    throw numerical_error("no_convergence", "power iteration for the trace constant did not converge");
}

}  // namespace steklov
