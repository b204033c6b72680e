#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>

#include "steklov/oracle.hpp"
#include "steklov/spectral.hpp"
#include "support.hpp"

using namespace steklov;

namespace {

const AssembledForms& disk(int level) {
    static std::deque<AssembledForms> cache;
    while (static_cast<int>(cache.size()) <= level) cache.push_back(assemble(generate_disk(static_cast<int>(cache.size()))));
    return cache[static_cast<std::size_t>(level)];
}

Eigen::MatrixXd random_spd(Index n, double shift) {
    Eigen::MatrixXd X(n, n);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) X(r, c) = test::uniform(-1, 1);
    }
    return X * X.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

// Finite eigenvalues of the full pencil by dense QZ.
std::vector<double> full_pencil(const AssembledForms& forms, double c) {
    const Eigen::MatrixXd A = forms.K.to_dense() + c * forms.M.to_dense();
    const Eigen::MatrixXd B = forms.B.to_dense();
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> qz(A, B);
    std::vector<double> finite;
    for (Index k = 0; k < A.rows(); ++k) {
        if (std::abs(qz.betas()(k)) > 1e-10 * B.norm()) finite.push_back(qz.alphas()(k).real() / qz.betas()(k));
    }
    std::sort(finite.begin(), finite.end());
    return finite;
}

Mesh jittered_square(int n) {
    Eigen::MatrixXd v((n + 1) * (n + 1), 2);
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            const bool edge = a == 0 || b == 0 || a == n || b == n;
            const double j = edge ? 0.0 : 0.25 / n;
            v.row(a * (n + 1) + b) << double(a) / n + test::uniform(-j, j), double(b) / n + test::uniform(-j, j);
        }
    }
    std::vector<Cell> cells;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Index p = a * (n + 1) + b;
            cells.push_back({p, p + n + 1, p + n + 2});
            cells.push_back({p, p + n + 2, p + 1});
        }
    }
    return make_mesh(2, v, cells);
}

}  // namespace

TEST_CASE("dense pencil solver basics") {
    Eigen::MatrixXd A = Eigen::Vector2d(1, 2).asDiagonal();
    const auto pairs = solve_dense_gevp(A, Eigen::MatrixXd::Identity(2, 2), 2);
    CHECK(pairs.values(0) == doctest::Approx(1.0));
    CHECK(pairs.values(1) == doctest::Approx(2.0));

    const Eigen::MatrixXd S = random_spd(6, 1.0);
    const auto ones = solve_dense_gevp(S, S, 6);
    for (Index j = 0; j < 6; ++j) CHECK(ones.values(j) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(test::error_code([&] { solve_dense_gevp(S, S, 7); }) == "k_exceeds_dofs");
    CHECK(test::error_code([&] { solve_dense_gevp(S, S, 0); }) == "k_exceeds_dofs");
}

TEST_CASE("random SPD pencils: residuals, B-orthonormality and determinism") {
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd A = random_spd(20, 0.1);
        const Eigen::MatrixXd B = random_spd(20, 1.0);
        const auto pairs = solve_dense_gevp(A, B, 8);
        const double a_norm = A.cwiseAbs().colwise().sum().maxCoeff();
        for (Index j = 0; j < 8; ++j) {
            const Eigen::VectorXd u = pairs.vectors.col(j);
            CHECK((A * u - pairs.values(j) * B * u).norm() <= 1e-9 * a_norm);
            if (j > 0) CHECK(pairs.values(j) >= pairs.values(j - 1));
        }
        const Eigen::MatrixXd gram = pairs.vectors.transpose() * B * pairs.vectors;
        CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
        const auto again = solve_dense_gevp(A, B, 8);
        CHECK((again.values - pairs.values).cwiseAbs().maxCoeff() == 0.0);
        CHECK((again.vectors - pairs.vectors).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("interval Steklov spectrum is {0, 2/L}") {
    for (double L : {1.0, 2.0, 5.0}) {
        const auto slice = steklov_spectrum(assemble(generate_interval(400, L)), 2);
        CHECK(std::abs(slice.eigenvalues(0)) < 1e-9);
        CHECK(slice.eigenvalues(1) == doctest::Approx(2.0 / L).epsilon(1e-10));
    }
}

TEST_CASE("disk spectra") {
    const auto steklov = steklov_spectrum(disk(4), 7);
    const double expected[] = {0, 1, 1, 2, 2, 3, 3};
    CHECK(std::abs(steklov.eigenvalues(0)) < 1e-9);
    for (int j = 1; j < 7; ++j) CHECK(std::abs(steklov.eigenvalues(j) - expected[j]) / expected[j] < 0.02);

    const auto robin = robin_steklov_spectrum(disk(4), 1.0, 1);
    CHECK(std::abs(robin.eigenvalues(0) - 0.446389965896534507) / 0.446389965896534507 < 0.02);
}

TEST_CASE("constant trace at c = 0 and B-orthonormal traces") {
    for (const auto& forms : {disk(3), assemble(test::octahedron_ball(2)), assemble(generate_interval(9, 1.0))}) {
        const Index nb = static_cast<Index>(forms.boundary_dofs.size());
        const Index k = std::min<Index>(nb, 6);
        const auto slice = steklov_spectrum(forms, k);
        CHECK(std::abs(slice.eigenvalues(0)) < 1e-9);
        const Eigen::VectorXd u0 = slice.eigenvectors.col(0);
        CHECK((u0.array() - u0.mean()).abs().maxCoeff() < 1e-8 * u0.cwiseAbs().maxCoeff());

        Eigen::MatrixXd B_bb(nb, nb);
        const Eigen::MatrixXd B = forms.B.to_dense();
        for (Index r = 0; r < nb; ++r) {
            for (Index c = 0; c < nb; ++c) B_bb(r, c) = B(forms.boundary_dofs[r], forms.boundary_dofs[c]);
        }
        const Eigen::MatrixXd gram = slice.eigenvectors.transpose() * B_bb * slice.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("Schur complement matches the full pencil on small random meshes") {
    for (int trial = 0; trial < 4; ++trial) {
        const auto forms = assemble(jittered_square(3 + trial % 3));
        REQUIRE(forms.num_dofs() <= 50);
        const Index nb = static_cast<Index>(forms.boundary_dofs.size());
        const double c = test::uniform(0.0, 5.0);
        const auto schur = robin_steklov_spectrum(forms, c, nb);
        const auto brute = full_pencil(forms, c);
        REQUIRE(static_cast<Index>(brute.size()) == nb);
        for (Index j = 0; j < nb; ++j) {
            CHECK(std::abs(schur.eigenvalues(j) - brute[static_cast<std::size_t>(j)]) <=
                  1e-8 * std::max(1.0, std::abs(brute[static_cast<std::size_t>(j)])));
        }
    }
}

TEST_CASE("iterative path agrees with the dense Schur complement") {
    SolverOptions iterative;
    iterative.dense_threshold = 0;
    for (const auto& forms : {disk(3), assemble(test::octahedron_ball(2)), assemble(generate_interval(50, 2.0))}) {
        const Index k = std::min<Index>(static_cast<Index>(forms.boundary_dofs.size()), 7);
        for (double c : {0.0, 0.7, 12.0}) {
            const auto dense = robin_steklov_spectrum(forms, c, k);
            const auto iter = robin_steklov_spectrum(forms, c, k, iterative);
            for (Index j = 0; j < k; ++j) {
                CHECK(std::abs(dense.eigenvalues(j) - iter.eigenvalues(j)) <=
                      1e-8 * std::max(1.0, std::abs(dense.eigenvalues(j))));
            }
            // Simple eigenvalues have matching traces up to the normalized sign.
            const Eigen::VectorXd d0 = dense.eigenvectors.col(0);
            const Eigen::VectorXd i0 = iter.eigenvectors.col(0);
            CHECK((d0 - i0).cwiseAbs().maxCoeff() < 1e-6 * d0.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("eigenvalues are nondecreasing in c, strictly for the first") {
    const auto& forms = disk(2);
    for (int trial = 0; trial < 10; ++trial) {
        const double c1 = test::uniform(0.0, 20.0);
        const double c2 = c1 + test::uniform(0.01, 5.0);
        const auto a = robin_steklov_spectrum(forms, c1, 8);
        const auto b = robin_steklov_spectrum(forms, c2, 8);
        CHECK(a.eigenvalues(0) < b.eigenvalues(0));
        for (Index j = 0; j < 8; ++j) CHECK(a.eigenvalues(j) <= b.eigenvalues(j) + 1e-12);
    }
}

TEST_CASE("homothety covariance") {
    for (const auto& forms : {disk(2), assemble(test::octahedron_ball(1)), assemble(generate_interval(20, 1.0))}) {
        const Index k = std::min<Index>(static_cast<Index>(forms.boundary_dofs.size()), 6);
        const auto base = steklov_spectrum(forms, k);
        for (int trial = 0; trial < 3; ++trial) {
            const double t = test::uniform(0.1, 10.0);
            const auto scaled = steklov_spectrum(scale_metric_forms(forms, t, forms.dim), k);
            for (Index j = 0; j < k; ++j) {
                const double ref = base.eigenvalues(j) / std::sqrt(t);
                CHECK(std::abs(scaled.eigenvalues(j) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
            }
        }
    }
}

TEST_CASE("second-order convergence of rho_1 on the disk") {
    std::vector<double> err;
    for (int level = 2; level <= 4; ++level) err.push_back(std::abs(steklov_spectrum(disk(level), 2).eigenvalues(1) - 1.0));
    for (int k = 0; k < 2; ++k) {
        const double order = std::log2(err[static_cast<std::size_t>(k)] / err[static_cast<std::size_t>(k) + 1]);
        CHECK(order >= 1.6);
        CHECK(order <= 2.4);
    }
}

TEST_CASE("eigencurves") {
    const std::vector<double> grid = {0.1, 0.3, 1.0, 2.0, 4.0};
    const auto flat = trace_eigencurve(disk(3), 0.0, 1, grid);
    const double rho1 = steklov_spectrum(disk(3), 2).eigenvalues(1);
    for (const auto& [t, value] : flat.samples) CHECK(value == rho1);

    const auto curve = trace_eigencurve(disk(4), 1.0, 0, grid, 1);
    CHECK(curve.factor_index == 1);
    for (std::size_t s = 0; s < curve.samples.size(); ++s) {
        const auto [t, value] = curve.samples[s];
        CHECK(std::abs(value - oracle::disk_robin_steklov(0, t)) / oracle::disk_robin_steklov(0, t) < 0.02);
        if (s > 0) CHECK(value > curve.samples[s - 1].second);
    }

    CHECK(test::error_code([&] { trace_eigencurve(disk(1), 1.0, 0, {}); }) == "invalid_argument");
    CHECK(test::error_code([&] { trace_eigencurve(disk(1), 1.0, 0, {1.0, 0.5}); }) == "invalid_argument");
    CHECK(test::error_code([&] { trace_eigencurve(disk(1), 1.0, 99, {1.0}); }) == "k_exceeds_boundary_dofs");
}

TEST_CASE("harmonic extension") {
    const auto& forms = disk(2);
    const Index nb = static_cast<Index>(forms.boundary_dofs.size());
    Eigen::VectorXd g(nb);
    for (Index r = 0; r < nb; ++r) g(r) = test::uniform(-1, 1);
    for (double c : {0.0, 3.0}) {
        const Eigen::VectorXd u = harmonic_extension(forms, g, c);
        const Eigen::VectorXd Au = (forms.K.to_sparse() + c * forms.M.to_sparse()) * u;
        for (Index v : forms.interior_dofs) CHECK(std::abs(Au(v)) < 1e-12);
        for (Index r = 0; r < nb; ++r) CHECK(u(forms.boundary_dofs[static_cast<std::size_t>(r)]) == g(r));
    }
    CHECK(test::error_code([&] { harmonic_extension(forms, Eigen::VectorXd::Zero(3)); }) == "invalid_argument");
}

TEST_CASE("Steklov eigenvalue membership") {
    const auto& forms = disk(3);
    const double rho1 = steklov_spectrum(forms, 2).eigenvalues(1);
    CHECK(is_steklov_eigenvalue(forms, rho1));
    CHECK(is_steklov_eigenvalue(forms, 0.0));
    CHECK_FALSE(is_steklov_eigenvalue(forms, 1.0 / 3.0));
    CHECK(spectrally_equal(1.0 + 5e-9, 1.0));
    CHECK_FALSE(spectrally_equal(1.0 + 2e-8, 1.0));
}

TEST_CASE("trace inequality constant") {
    for (const auto& forms : {disk(2), assemble(generate_disk(5))}) {
        const double C = trace_inequality_constant(forms);
        CHECK(C >= forms.M.total() / forms.B.total() * (1.0 - 1e-12));
        const SparseMatrix M = forms.M.to_sparse();
        const SparseMatrix KB = forms.K.to_sparse() + forms.B.to_sparse();
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd x(forms.num_dofs());
            for (Index v = 0; v < x.size(); ++v) x(v) = test::uniform(-1, 1);
            CHECK(x.dot(M * x) <= C * x.dot(KB * x) * (1.0 + 1e-12));
        }
    }
    // Dense and iterative estimates agree where both apply.
    const auto mid = assemble(generate_disk(4));
    CHECK(trace_inequality_constant(mid) == doctest::Approx(trace_inequality_constant(disk(3))).epsilon(0.05));
}

TEST_CASE("spectral preconditions") {
    CHECK(test::error_code([] { robin_steklov_spectrum(disk(0), 0.0, 9); }) == "k_exceeds_boundary_dofs");
    CHECK(test::error_code([] { robin_steklov_spectrum(disk(0), -1.0, 2); }) == "invalid_argument");
    CHECK(test::error_code([] { robin_steklov_spectrum(disk(0), 0.0, 0); }) == "k_exceeds_boundary_dofs");
}
