#include "steklov/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>

#include "steklov/errors.hpp"

namespace steklov {

SparseSymMatrix::SparseSymMatrix(Index n, std::vector<MatrixEntry> entries) : n_(n) {
    for (auto& e : entries) {
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
            throw precondition_error("invalid_argument", "matrix entry index out of range");
        }
        if (e.row > e.col) std::swap(e.row, e.col);
    }
    std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().value += e.value;
        } else {
            entries_.push_back(e);
        }
    }
}

SparseMatrix SparseSymMatrix::to_sparse() const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * entries_.size());
    for (const auto& e : entries_) {
        triplets.emplace_back(e.row, e.col, e.value);
        if (e.row != e.col) triplets.emplace_back(e.col, e.row, e.value);
    }
    SparseMatrix A(n_, n_);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : entries_) {
        A(e.row, e.col) = e.value;
        A(e.col, e.row) = e.value;
    }
    return A;
}

SparseSymMatrix SparseSymMatrix::scaled(double factor) const {
    SparseSymMatrix out = *this;
    for (auto& e : out.entries_) e.value *= factor;
    return out;
}

double SparseSymMatrix::one_norm() const {
    std::vector<double> sums(static_cast<std::size_t>(n_), 0.0);
    for (const auto& e : entries_) {
        sums[static_cast<std::size_t>(e.col)] += std::abs(e.value);
        if (e.row != e.col) sums[static_cast<std::size_t>(e.row)] += std::abs(e.value);
    }
    return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

double SparseSymMatrix::total() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += (e.row == e.col ? 1.0 : 2.0) * e.value;
    return sum;
}

AssembledForms assemble(const Mesh& mesh) {
    const int d = mesh.dim;
    const Index n = mesh.num_vertices();
    std::vector<MatrixEntry> k_entries;
    std::vector<MatrixEntry> m_entries;
    std::vector<MatrixEntry> b_entries;
    k_entries.reserve(mesh.cells.size() * static_cast<std::size_t>((d + 1) * (d + 2) / 2));
    m_entries.reserve(k_entries.capacity());

    // ∫ λ_a λ_b = |T| (1 + δ_ab) / ((d+1)(d+2)) on a d-simplex.
    const double mass_scale = 1.0 / ((d + 1) * (d + 2));
    Eigen::MatrixXd grads(d + 1, d);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Cell& cell = mesh.cells[c];
        Eigen::MatrixXd J(d, d);
        for (int k = 0; k < d; ++k) {
            J.col(k) = (mesh.vertices.row(cell[k + 1]) - mesh.vertices.row(cell[0])).transpose();
        }
        const double vol = signed_cell_volume(mesh, c);
        if (!(vol > 0.0)) {
            throw precondition_error("degenerate_cell",
                                     "assembly failed: cell " + std::to_string(c) + " has non-positive volume");
        }
        const Eigen::MatrixXd Jinv = J.inverse();
        grads.bottomRows(d) = Jinv;
        grads.row(0) = -Jinv.colwise().sum();
        const Eigen::MatrixXd local_k = vol * grads * grads.transpose();
        for (int a = 0; a <= d; ++a) {
            for (int b = a; b <= d; ++b) {
                k_entries.push_back({cell[a], cell[b], local_k(a, b)});
                m_entries.push_back({cell[a], cell[b], vol * mass_scale * (a == b ? 2.0 : 1.0)});
            }
        }
    }

    // Same formula one dimension down; for d = 1 the facet is a point with
    // counting measure 1 and the formula gives B = 1.
    const double boundary_scale = 1.0 / (d * (d + 1));
    for (const auto& facet : mesh.boundary_facets) {
        const double area = facet_measure(mesh, facet);
        for (std::size_t a = 0; a < facet.size(); ++a) {
            for (std::size_t b = a; b < facet.size(); ++b) {
                b_entries.push_back({facet[a], facet[b], area * boundary_scale * (a == b ? 2.0 : 1.0)});
            }
        }
    }

    AssembledForms forms;
    forms.K = SparseSymMatrix(n, std::move(k_entries));
    forms.M = SparseSymMatrix(n, std::move(m_entries));
    forms.B = SparseSymMatrix(n, std::move(b_entries));
    forms.boundary_dofs = mesh.boundary_vertex_ids;
    forms.dim = d;
    std::vector<bool> on_boundary(static_cast<std::size_t>(n), false);
    for (Index v : forms.boundary_dofs) on_boundary[static_cast<std::size_t>(v)] = true;
    for (Index v = 0; v < n; ++v) {
        if (!on_boundary[static_cast<std::size_t>(v)]) forms.interior_dofs.push_back(v);
    }
    return forms;
}

AssembledForms scale_metric_forms(const AssembledForms& forms, double t, int m) {
    if (!(t > 0.0)) throw precondition_error("invalid_argument", "metric scale t must be positive");
    if (m != forms.dim) {
        throw precondition_error("invalid_argument", "metric scaling exponent m must equal the mesh dimension");
    }
    if (t == 1.0) return forms;
    AssembledForms out = forms;
    out.K = forms.K.scaled(std::pow(t, 0.5 * (m - 2)));
    out.M = forms.M.scaled(std::pow(t, 0.5 * m));
    out.B = forms.B.scaled(std::pow(t, 0.5 * (m - 1)));
    return out;
}

void write_coordinate_text(std::ostream& out, const SparseSymMatrix& matrix) {
    out << "% " << matrix.size() << ' ' << matrix.entries().size() << '\n';
    char buf[64];
    for (const auto& e : matrix.entries()) {
        std::snprintf(buf, sizeof buf, "%.17g", e.value);
        out << e.row << ' ' << e.col << ' ' << buf << '\n';
    }
}

}  // namespace steklov
