#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "steklov/errors.hpp"

namespace steklov {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

Eigen::MatrixXd edge_matrix(const Mesh& mesh, const Cell& simplex) {
    const Index n_edges = static_cast<Index>(simplex.size()) - 1;
    Eigen::MatrixXd E(mesh.dim, n_edges);
    for (Index k = 0; k < n_edges; ++k) {
        E.col(k) = (mesh.vertices.row(simplex[k + 1]) - mesh.vertices.row(simplex[0])).transpose();
    }
    return E;
}

bool has_repeated_index(const Cell& cell) {
    Cell sorted = cell;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double longest_edge(const Mesh& mesh, const Cell& cell) {
    double h = 0.0;
    for (std::size_t a = 0; a < cell.size(); ++a) {
        for (std::size_t b = a + 1; b < cell.size(); ++b) {
            h = std::max(h, (mesh.vertices.row(cell[a]) - mesh.vertices.row(cell[b])).norm());
        }
    }
    return h;
}

struct DisjointSets {
    std::vector<Index> parent;
    explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(Index a, Index b) { parent[find(a)] = find(b); }
};

std::vector<Index> boundary_vertices_of(const std::vector<Cell>& facets) {
    std::set<Index> ids;
    for (const auto& f : facets) ids.insert(f.begin(), f.end());
    return {ids.begin(), ids.end()};
}

}  // namespace

double signed_cell_volume(const Mesh& mesh, Index c) {
    const Cell& cell = mesh.cells[c];
    return edge_matrix(mesh, cell).determinant() / factorial(mesh.dim);
}

double facet_measure(const Mesh& mesh, const Cell& facet) {
    if (mesh.dim == 1) return 1.0;
    const Eigen::MatrixXd E = edge_matrix(mesh, facet);
    const double gram = (E.transpose() * E).determinant();
    return std::sqrt(std::max(gram, 0.0)) / factorial(mesh.dim - 1);
}

double total_cell_measure(const Mesh& mesh) {
    double total = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) total += std::abs(signed_cell_volume(mesh, c));
    return total;
}

double total_boundary_measure(const Mesh& mesh) {
    double total = 0.0;
    for (const auto& f : mesh.boundary_facets) total += facet_measure(mesh, f);
    return total;
}

std::vector<Cell> extract_boundary_facets(int dim, const std::vector<Cell>& cells) {
    std::map<Cell, int> counts;
    for (const auto& cell : cells) {
        for (int skip = 0; skip <= dim; ++skip) {
            Cell facet;
            facet.reserve(static_cast<std::size_t>(dim));
            for (int k = 0; k <= dim; ++k) {
                if (k != skip) facet.push_back(cell[static_cast<std::size_t>(k)]);
            }
            std::sort(facet.begin(), facet.end());
            ++counts[facet];
        }
    }
    std::vector<Cell> boundary;
    for (const auto& [facet, n] : counts) {
        if (n == 1) boundary.push_back(facet);
    }
    return boundary;
}

std::vector<std::string> validate(const Mesh& mesh) {
    std::vector<std::string> report;
    if (mesh.dim < 1 || mesh.vertices.cols() != mesh.dim) {
        report.push_back("index out of range: vertex coordinates do not match dim " + std::to_string(mesh.dim));
        return report;
    }
    if (mesh.cells.empty()) {
        report.push_back("degenerate cell: mesh has no cells");
        return report;
    }

    bool indices_ok = true;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Cell& cell = mesh.cells[c];
        if (static_cast<int>(cell.size()) != mesh.dim + 1) {
            report.push_back("index out of range: cell " + std::to_string(c) + " has " +
                             std::to_string(cell.size()) + " vertices");
            indices_ok = false;
            continue;
        }
        for (Index v : cell) {
            if (v < 0 || v >= mesh.num_vertices()) {
                report.push_back("index out of range: cell " + std::to_string(c) + " references vertex " +
                                 std::to_string(v));
                indices_ok = false;
            }
        }
    }
    if (!indices_ok) return report;

    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Cell& cell = mesh.cells[c];
        if (has_repeated_index(cell)) {
            report.push_back("degenerate cell: cell " + std::to_string(c) + " repeats a vertex index");
            continue;
        }
        const double vol = signed_cell_volume(mesh, c);
        const double scale = std::pow(longest_edge(mesh, cell), mesh.dim);
        if (std::abs(vol) <= 1e-14 * scale) {
            report.push_back("degenerate cell: cell " + std::to_string(c) + " has zero volume");
        } else if (vol < 0.0) {
            report.push_back("inverted cell: cell " + std::to_string(c) + " is negatively oriented");
        }
    }

    const auto expected = extract_boundary_facets(mesh.dim, mesh.cells);
    std::vector<Cell> given = mesh.boundary_facets;
    for (auto& f : given) std::sort(f.begin(), f.end());
    std::sort(given.begin(), given.end());
    if (given != expected) {
        std::vector<Cell> extra;
        std::set_difference(given.begin(), given.end(), expected.begin(), expected.end(),
                            std::back_inserter(extra));
        std::ostringstream msg;
        msg << "boundary mismatch: " << extra.size() << " listed facet(s) are not boundary facets, "
            << "listed " << given.size() << ", expected " << expected.size();
        report.push_back(msg.str());
    }
    if (mesh.boundary_vertex_ids != boundary_vertices_of(expected)) {
        report.push_back("boundary vertex mismatch: boundary_vertex_ids differ from the facet vertices");
    }

    DisjointSets sets(mesh.num_vertices());
    for (const auto& cell : mesh.cells) {
        for (std::size_t k = 1; k < cell.size(); ++k) sets.unite(cell[0], cell[k]);
    }
    const Index root = sets.find(0);
    for (Index v = 1; v < mesh.num_vertices(); ++v) {
        if (sets.find(v) != root) {
            report.push_back("disconnected: vertex " + std::to_string(v) + " is not connected to vertex 0");
            break;
        }
    }
    return report;
}

Mesh make_mesh(int dim, Eigen::MatrixXd vertices, std::vector<Cell> cells) {
    Mesh mesh;
    mesh.dim = dim;
    mesh.vertices = std::move(vertices);
    mesh.cells = std::move(cells);
    bool shape_ok = dim >= 1 && mesh.vertices.cols() == dim;
    for (const auto& cell : mesh.cells) {
        shape_ok = shape_ok && static_cast<int>(cell.size()) == dim + 1;
    }
    if (shape_ok) {
        mesh.boundary_facets = extract_boundary_facets(dim, mesh.cells);
        mesh.boundary_vertex_ids = boundary_vertices_of(mesh.boundary_facets);
    }
    const auto report = validate(mesh);
    if (!report.empty()) {
        std::string msg = "invalid mesh:";
        for (const auto& line : report) msg += "\n  " + line;
        throw precondition_error("mesh_invalid", msg);
    }
    return mesh;
}

void project_to_unit_sphere(Eigen::Ref<Eigen::RowVectorXd> point) {
    const double r = point.norm();
    if (r > 0.0) point /= r;
}

Mesh refine_uniform(const Mesh& mesh, const BoundaryProjection& project) {
    if (mesh.dim < 1 || mesh.dim > 3) {
        throw precondition_error("invalid_argument", "refine_uniform supports dimensions 1 to 3");
    }
    std::set<std::pair<Index, Index>> boundary_edges;
    for (const auto& f : mesh.boundary_facets) {
        for (std::size_t a = 0; a < f.size(); ++a) {
            for (std::size_t b = a + 1; b < f.size(); ++b) {
                boundary_edges.emplace(std::min(f[a], f[b]), std::max(f[a], f[b]));
            }
        }
    }

    std::vector<Eigen::RowVectorXd> added;
    std::map<std::pair<Index, Index>, Index> midpoint_of;
    auto midpoint = [&](Index a, Index b) {
        const std::pair<Index, Index> key{std::min(a, b), std::max(a, b)};
        auto it = midpoint_of.find(key);
        if (it != midpoint_of.end()) return it->second;
        Eigen::RowVectorXd p = 0.5 * (mesh.vertices.row(a) + mesh.vertices.row(b));
        if (project && boundary_edges.count(key) != 0) project(p);
        const Index id = mesh.num_vertices() + static_cast<Index>(added.size());
        added.push_back(p);
        midpoint_of.emplace(key, id);
        return id;
    };

    std::vector<Cell> children;
    children.reserve(mesh.cells.size() * (std::size_t{1} << mesh.dim));
    for (const auto& c : mesh.cells) {
        switch (mesh.dim) {
            case 1: {
                const Index m = midpoint(c[0], c[1]);
                children.push_back({c[0], m});
                children.push_back({m, c[1]});
                break;
            }
            case 2: {
                const Index m01 = midpoint(c[0], c[1]);
                const Index m12 = midpoint(c[1], c[2]);
                const Index m02 = midpoint(c[0], c[2]);
                children.push_back({c[0], m01, m02});
                children.push_back({m01, c[1], m12});
                children.push_back({m02, m12, c[2]});
                children.push_back({m01, m12, m02});
                break;
            }
            default: {
                const Index m01 = midpoint(c[0], c[1]);
                const Index m02 = midpoint(c[0], c[2]);
                const Index m03 = midpoint(c[0], c[3]);
                const Index m12 = midpoint(c[1], c[2]);
                const Index m13 = midpoint(c[1], c[3]);
                const Index m23 = midpoint(c[2], c[3]);
                children.push_back({c[0], m01, m02, m03});
                children.push_back({m01, c[1], m12, m13});
                children.push_back({m02, m12, c[2], m23});
                children.push_back({m03, m13, m23, c[3]});
                // octahedron split along the m02-m13 diagonal
                children.push_back({m01, m02, m03, m13});
                children.push_back({m01, m02, m12, m13});
                children.push_back({m02, m03, m13, m23});
                children.push_back({m02, m12, m13, m23});
                break;
            }
        }
    }

    Eigen::MatrixXd vertices(mesh.num_vertices() + static_cast<Index>(added.size()), mesh.dim);
    vertices.topRows(mesh.num_vertices()) = mesh.vertices;
    for (std::size_t k = 0; k < added.size(); ++k) {
        vertices.row(mesh.num_vertices() + static_cast<Index>(k)) = added[k];
    }

    Mesh refined;
    refined.dim = mesh.dim;
    refined.vertices = std::move(vertices);
    refined.cells = std::move(children);
    for (Index c = 0; c < refined.num_cells(); ++c) {
        if (signed_cell_volume(refined, c) < 0.0) std::swap(refined.cells[c][0], refined.cells[c][1]);
    }
    return make_mesh(refined.dim, std::move(refined.vertices), std::move(refined.cells));
}

Mesh generate_disk(int refinement_level) {
    if (refinement_level < 0) {
        throw precondition_error("invalid_argument", "refinement level must be non-negative");
    }
    constexpr int fan = 8;
    Eigen::MatrixXd vertices(fan + 1, 2);
    vertices.row(0) << 0.0, 0.0;
    for (int k = 0; k < fan; ++k) {
        const double theta = 2.0 * M_PI * k / fan;
        vertices.row(k + 1) << std::cos(theta), std::sin(theta);
    }
    std::vector<Cell> cells;
    for (int k = 0; k < fan; ++k) cells.push_back({0, k + 1, (k + 1) % fan + 1});

    Mesh mesh = make_mesh(2, std::move(vertices), std::move(cells));
    for (int level = 0; level < refinement_level; ++level) {
        mesh = refine_uniform(mesh, project_to_unit_sphere);
    }
    return mesh;
}

Mesh generate_interval(int cells, double length) {
    if (cells < 1) throw precondition_error("invalid_argument", "interval needs at least one cell");
    if (!(length > 0.0)) throw precondition_error("invalid_argument", "interval length must be positive");
    Eigen::MatrixXd vertices(cells + 1, 1);
    for (int k = 0; k <= cells; ++k) vertices(k, 0) = length * k / cells;
    vertices(cells, 0) = length;
    std::vector<Cell> cell_list;
    cell_list.reserve(static_cast<std::size_t>(cells));
    for (int k = 0; k < cells; ++k) cell_list.push_back({k, k + 1});
    return make_mesh(1, std::move(vertices), std::move(cell_list));
}

}  // namespace steklov
