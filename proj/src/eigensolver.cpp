#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "eigensolver_internal.hpp"
#include "steklov/errors.hpp"

namespace steklov {

namespace {

double one_norm(const Eigen::MatrixXd& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().colwise().sum().maxCoeff();
}

double one_norm(const SparseMatrix& A) {
    Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(A.cols());
    for (Index j = 0; j < A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) col_sums(it.col()) += std::abs(it.value());
    }
    return col_sums.size() == 0 ? 0.0 : col_sums.maxCoeff();
}

std::string residual_report(const Eigen::VectorXd& residuals) {
    std::ostringstream out;
    out << "residual norms:";
    for (Index j = 0; j < residuals.size(); ++j) out << ' ' << residuals(j);
    return out.str();
}

}  // namespace

namespace detail {

void normalize_signs(Eigen::MatrixXd& vectors) {
    for (Index j = 0; j < vectors.cols(); ++j) {
        Index arg = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
    }
}

EigenPairs shift_invert_subspace(const SparseMatrix& A, const SparseMatrix& B, Index k,
                                 const SolverOptions& options) {
    const Index n = A.rows();
    const double norm_a = one_norm(A);
    const double norm_b = one_norm(B);
    // Any positive shift makes A + σB definite; a small one keeps the lower
    // end of the spectrum well separated after inversion.
    const double sigma = 1e-2 * norm_a / std::max(norm_b, 1e-300);
    const SparseMatrix shifted = A + sigma * B;
    Eigen::SimplicialLLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success) {
        throw numerical_error("singular_interior_block", "shift-invert factorization failed");
    }

    const Index block = std::min<Index>(n, 2 * k + 8);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::MatrixXd X(n, block);
    for (Index j = 0; j < block; ++j) {
        for (Index r = 0; r < n; ++r) X(r, j) = uniform(rng);
    }

    Eigen::VectorXd theta;
    Eigen::VectorXd residuals(k);
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        const Eigen::MatrixXd BX = B * X;
        Eigen::MatrixXd Y = factor.solve(BX);

        // B-orthonormal basis of span(Y); drops directions B cannot see.
        Eigen::MatrixXd gram_b = Y.transpose() * (B * Y);
        gram_b = 0.5 * (gram_b + gram_b.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram_b);
        const Eigen::VectorXd& lam = gram_eig.eigenvalues();
        const double cutoff = 1e-14 * lam.cwiseAbs().maxCoeff();
        std::vector<Index> kept;
        for (Index j = 0; j < lam.size(); ++j) {
            if (lam(j) > cutoff) kept.push_back(j);
        }
        if (static_cast<Index>(kept.size()) < k) {
            throw numerical_error("no_convergence", "subspace iteration lost rank");
        }
        Eigen::MatrixXd W(n, static_cast<Index>(kept.size()));
        for (std::size_t j = 0; j < kept.size(); ++j) {
            W.col(static_cast<Index>(j)) = Y * gram_eig.eigenvectors().col(kept[j]) / std::sqrt(lam(kept[j]));
        }

        Eigen::MatrixXd H = W.transpose() * (A * W);
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
        theta = ritz.eigenvalues();
        X = W * ritz.eigenvectors();

        const Eigen::MatrixXd AX = A * X.leftCols(k);
        const Eigen::MatrixXd BXk = B * X.leftCols(k);
        for (Index j = 0; j < k; ++j) {
            const double scale = (norm_a + std::abs(theta(j)) * norm_b) * X.col(j).norm();
            residuals(j) = (AX.col(j) - theta(j) * BXk.col(j)).norm() / std::max(scale, 1e-300);
        }
        if (residuals.maxCoeff() <= options.tolerance) {
            EigenPairs out;
            out.values = theta.head(k);
            out.vectors = X.leftCols(k);
            return out;
        }
    }
    throw numerical_error("no_convergence", "shift-invert subspace iteration did not converge; " +
                                                residual_report(residuals));
}

}  // namespace detail

EigenPairs solve_dense_gevp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Index k) {
    const Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n) {
        throw precondition_error("invalid_argument", "pencil matrices must be square and of equal size");
    }
    if (k < 1 || k > n) {
        throw precondition_error("k_exceeds_dofs", "requested " + std::to_string(k) + " eigenpairs of a " +
                                                       std::to_string(n) + "x" + std::to_string(n) + " pencil");
    }
    const Eigen::MatrixXd As = 0.5 * (A + A.transpose());
    const Eigen::MatrixXd Bs = 0.5 * (B + B.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(As, Bs, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("no_convergence", "dense generalized eigensolver failed (B not positive definite?)");
    }
    EigenPairs out;
    out.values = solver.eigenvalues().head(k);
    out.vectors = solver.eigenvectors().leftCols(k);
    detail::normalize_signs(out.vectors);

    const double norm_a = one_norm(As);
    const double norm_b = one_norm(Bs);
    Eigen::VectorXd residuals(k);
    bool ok = true;
    for (Index j = 0; j < k; ++j) {
        const Eigen::VectorXd u = out.vectors.col(j);
        residuals(j) = (As * u - out.values(j) * (Bs * u)).norm();
        const double bound = 1e-9 * (norm_a + std::abs(out.values(j)) * norm_b) * std::max(u.norm(), 1.0);
        ok = ok && residuals(j) <= bound;
    }
    if (!ok) throw numerical_error("no_convergence", "dense eigensolver residual too large; " + residual_report(residuals));
    return out;
}

EigenPairs solve_dense_gevp(const SparseSymMatrix& A, const SparseSymMatrix& B, Index k) {
    return solve_dense_gevp(A.to_dense(), B.to_dense(), k);
}

}  // namespace steklov
