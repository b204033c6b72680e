#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

using nlohmann::json;

Mesh parse_mesh_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw precondition_error("parse_error", std::string("mesh JSON: ") + e.what());
    }
    if (!doc.contains("dim") || !doc.contains("vertices") || !doc.contains("cells")) {
        throw precondition_error("parse_error", "mesh JSON requires keys dim, vertices, cells");
    }

    Mesh mesh;
    try {
        const int dim = doc.at("dim").get<int>();
        const auto& verts = doc.at("vertices");
        Eigen::MatrixXd vertices(static_cast<Index>(verts.size()), std::max(dim, 0));
        for (std::size_t v = 0; v < verts.size(); ++v) {
            const auto coords = verts[v].get<std::vector<double>>();
            if (static_cast<int>(coords.size()) != dim) {
                throw precondition_error("parse_error",
                                         "vertex " + std::to_string(v) + " does not have dim coordinates");
            }
            for (int d = 0; d < dim; ++d) vertices(static_cast<Index>(v), d) = coords[static_cast<std::size_t>(d)];
        }
        auto cells = doc.at("cells").get<std::vector<Cell>>();
        mesh = make_mesh(dim, std::move(vertices), std::move(cells));

        if (doc.contains("boundary_facets")) {
            auto given = doc.at("boundary_facets").get<std::vector<Cell>>();
            for (auto& f : given) std::sort(f.begin(), f.end());
            std::sort(given.begin(), given.end());
            if (given != mesh.boundary_facets) {
                throw precondition_error("mesh_invalid",
                                         "boundary mismatch: boundary_facets in file differ from the recomputed set");
            }
        }
    } catch (const json::exception& e) {
        throw precondition_error("parse_error", std::string("mesh JSON: ") + e.what());
    }
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("io_error", "cannot open mesh file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_mesh_json(buffer.str());
}

std::string mesh_to_json(const Mesh& mesh) {
    json doc;
    doc["dim"] = mesh.dim;
    json verts = json::array();
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        std::vector<double> coords;
        for (int d = 0; d < mesh.dim; ++d) coords.push_back(mesh.vertices(v, d));
        verts.push_back(coords);
    }
    doc["vertices"] = std::move(verts);
    doc["cells"] = mesh.cells;
    doc["boundary_facets"] = mesh.boundary_facets;
    return doc.dump();
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw precondition_error("io_error", "cannot write mesh file " + path);
    out << mesh_to_json(mesh) << '\n';
}

}  // namespace steklov
