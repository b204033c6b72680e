#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steklov/bifurcation.hpp"
#include "steklov/product.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

/// Fixed 17-significant-digit formatting used by every emitted file.
std::string format_real(double value);

// CSV header `j,rho`.
void write_slice_csv(std::ostream& out, const SpectrumSlice& slice);
std::vector<std::pair<int, double>> read_slice_csv(std::istream& in);

// CSV header `t,i,j,rho`.
void write_curves_csv(std::ostream& out, const std::vector<EigenCurve>& curves);
std::vector<EigenCurve> read_curves_csv(std::istream& in);

// CSV header `i,j,rho,jacobi_value,multiplicity`.
void write_jacobi_csv(std::ostream& out, const JacobiSlice& slice);
std::vector<JacobiEntry> read_jacobi_csv(std::istream& in);

// JSON array of records; CSV with one row per crossing and header
// `t_star,i,j,multiplicity,nullity,n_minus,n_plus,certified` (empty index
// fields for uncertified records).
std::string records_to_json(const std::vector<DegeneracyRecord>& records);
std::vector<DegeneracyRecord> records_from_json(const std::string& text);
void write_records_csv(std::ostream& out, const std::vector<DegeneracyRecord>& records);
std::vector<DegeneracyRecord> read_records_csv(std::istream& in);

/// Geometry of a builtin mesh, used to select a closed-form cross-check.
struct OracleGeometry {
    enum class Kind { None, UnitDisk, Interval };
    Kind kind = Kind::None;
    double length = 0.0;
};

/// Resolves `builtin:disk:<level>`, `builtin:interval:<cells>:<length>` or a
/// JSON mesh path (relative paths against `base_dir`).
Mesh resolve_mesh(const std::string& spec, const std::string& base_dir, OracleGeometry* geometry = nullptr);

/// Model description file:
///   {
///     "factor": {"dim", "entries", "cutoff"} | {"flat_torus": {"basis", "cutoff"}} | {"file": path},
///     "mesh": "builtin:disk:4" | path,
///     "H2": 1.0,
///     "m1": 2, "m2": 2,                // optional, cross-checked
///     "solver": {"dense_threshold": 2000, "tolerance": 1e-10},  // optional
///     "degeneracy_tol": 1e-6           // optional
///   }
/// Extra keys are kept for command parameters.
struct ModelConfig {
    std::string text;      ///< the raw JSON document
    std::string base_dir;  ///< directory of the config file
    ProductModel model;
    OracleGeometry geometry;
    std::optional<double> degeneracy_tol;
};

ModelConfig parse_model_config(const std::string& text, const std::string& base_dir);
ModelConfig load_model_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace steklov
