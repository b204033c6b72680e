#pragma once

#include <random>
#include <string>

#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"

namespace test {

// Reason code of the steklov::Error thrown by f, or a marker when none is.
template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const steklov::Error& e) {
        return e.code();
    }
    return "<no error>";
}

inline std::mt19937& rng() {
    static std::mt19937 engine(20261015u);
    return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

// Unit ball from the 8-tet octahedron, refined with sphere projection.
inline steklov::Mesh octahedron_ball(int levels) {
    Eigen::MatrixXd v(7, 3);
    v << 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    std::vector<steklov::Cell> cells;
    for (steklov::Index x : {1, 2}) {
        for (steklov::Index y : {3, 4}) {
            for (steklov::Index z : {5, 6}) {
                steklov::Cell cell{0, x, y, z};
                if ((x == 2) != (y == 4) != (z == 6)) std::swap(cell[2], cell[3]);
                cells.push_back(cell);
            }
        }
    }
    auto mesh = steklov::make_mesh(3, v, cells);
    for (int l = 0; l < levels; ++l) mesh = steklov::refine_uniform(mesh, steklov::project_to_unit_sphere);
    return mesh;
}

}  // namespace test
