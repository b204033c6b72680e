#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace steklov {

using Index = std::ptrdiff_t;
using Cell = std::vector<Index>;

/// Simplicial mesh of a flat manifold with boundary.
///
/// Vertices are stored row-wise (one row per vertex, `dim` columns). Cells are
/// positively oriented simplices with `dim + 1` vertex indices. Boundary facets
/// are the `dim`-tuples of vertices incident to exactly one cell; for a 1-D
/// mesh they are single endpoint vertices.
///
/// Build instances through make_mesh() or one of the generators; the raw
/// aggregate is public so that validate() can inspect arbitrary (possibly
/// broken) input.
struct Mesh {
    int dim = 0;
    Eigen::MatrixXd vertices;
    std::vector<Cell> cells;
    std::vector<Cell> boundary_facets;
    std::vector<Index> boundary_vertex_ids;

    Index num_vertices() const { return vertices.rows(); }
    Index num_cells() const { return static_cast<Index>(cells.size()); }
};

/// Assembles a mesh and derives its boundary facets and boundary vertex ids.
/// Throws a precondition error ("mesh_invalid") when any invariant fails.
Mesh make_mesh(int dim, Eigen::MatrixXd vertices, std::vector<Cell> cells);

/// Signed volume of cell `c` (positive for positively oriented simplices).
double signed_cell_volume(const Mesh& mesh, Index c);

/// Measure of a boundary facet. Points (facets of 1-D meshes) carry counting
/// measure 1.
double facet_measure(const Mesh& mesh, const Cell& facet);

double total_cell_measure(const Mesh& mesh);
double total_boundary_measure(const Mesh& mesh);

/// Facets incident to exactly one cell, each sorted ascending, in sorted order.
std::vector<Cell> extract_boundary_facets(int dim, const std::vector<Cell>& cells);

/// Maps a new boundary vertex (created at an edge midpoint) to its final
/// position. Receives the midpoint coordinates and may modify them in place.
using BoundaryProjection = std::function<void(Eigen::Ref<Eigen::RowVectorXd>)>;

/// Uniform refinement by edge midpoints: 2 children per interval, 4 per
/// triangle, 8 per tetrahedron. When `project` is set it is applied to every
/// midpoint of a boundary edge.
Mesh refine_uniform(const Mesh& mesh, const BoundaryProjection& project = {});

/// Radial projection onto the unit sphere centred at the origin.
void project_to_unit_sphere(Eigen::Ref<Eigen::RowVectorXd> point);

/// Closed unit disk: a fan of 8 triangles around the origin refined
/// `refinement_level` times, boundary midpoints projected onto the circle.
Mesh generate_disk(int refinement_level);

/// Interval [0, length] split into `cells` equal pieces.
Mesh generate_interval(int cells, double length);

/// Human-readable list of violated invariants; empty iff the mesh is valid.
/// Entries start with a stable tag: "index out of range", "degenerate cell",
/// "inverted cell", "boundary mismatch", "boundary vertex mismatch",
/// "disconnected".
std::vector<std::string> validate(const Mesh& mesh);

/// Reads the JSON mesh format ({"dim", "vertices", "cells", optional
/// "boundary_facets"}); provided boundary facets are cross-checked against the
/// recomputed ones.
Mesh load_mesh(const std::string& path);
Mesh parse_mesh_json(const std::string& text);
std::string mesh_to_json(const Mesh& mesh);
void save_mesh(const Mesh& mesh, const std::string& path);

}  // namespace steklov
