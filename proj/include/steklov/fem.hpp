#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "steklov/mesh.hpp"

namespace steklov {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct MatrixEntry {
    Index row;
    Index col;
    double value;
};

/// Symmetric sparse matrix stored as its upper triangle (row <= col) in
/// coordinate form. Construction sums duplicate entries, so every (row, col)
/// pair appears at most once and in row-major order.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;

    /// Entries below the diagonal are mirrored to the upper triangle before
    /// duplicates are summed.
    SparseSymMatrix(Index n, std::vector<MatrixEntry> entries);

    Index size() const { return n_; }
    const std::vector<MatrixEntry>& entries() const { return entries_; }

    /// Full symmetric matrix (both triangles).
    SparseMatrix to_sparse() const;
    Eigen::MatrixXd to_dense() const;

    SparseSymMatrix scaled(double factor) const;

    /// Maximum absolute column sum.
    double one_norm() const;

    /// Sum of all entries of the full matrix, i.e. 1ᵀ A 1.
    double total() const;

private:
    Index n_ = 0;
    std::vector<MatrixEntry> entries_;
};

/// The three P1 bilinear forms on a mesh: stiffness K (∫ ∇φ·∇ψ), interior
/// mass M (∫ φψ) and boundary mass B (∫_∂ φψ, nonzero only on boundary dofs).
struct AssembledForms {
    SparseSymMatrix K;
    SparseSymMatrix M;
    SparseSymMatrix B;
    std::vector<Index> boundary_dofs;
    std::vector<Index> interior_dofs;
    int dim = 0;

    Index num_dofs() const { return K.size(); }
};

/// Exact element integration for affine simplices. Throws a precondition
/// error ("degenerate_cell") naming the first cell with non-positive volume.
AssembledForms assemble(const Mesh& mesh);

/// Forms of the homothetic metric t·g on an m-dimensional mesh:
/// K ↦ t^{(m-2)/2} K, M ↦ t^{m/2} M, B ↦ t^{(m-1)/2} B.
AssembledForms scale_metric_forms(const AssembledForms& forms, double t, int m);

/// Writes `row col value` lines (upper triangle, 0-based, 17 significant
/// digits) preceded by a `% n nnz` header.
void write_coordinate_text(std::ostream& out, const SparseSymMatrix& matrix);

}  // namespace steklov
