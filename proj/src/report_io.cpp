#include "steklov/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "steklov/errors.hpp"

namespace steklov {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Data rows after checking the header; each row has exactly `header`'s arity.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw precondition_error("parse_error", "expected CSV header '" + header + "'");
    }
    const std::size_t arity = split_csv_line(header).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != arity) throw precondition_error("parse_error", "malformed CSV row: " + line);
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw precondition_error("parse_error", "not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    const double v = parse_real(s);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw precondition_error("parse_error", "not an integer: '" + s + "'");
    }
    return static_cast<int>(v);
}

json record_to_json(const DegeneracyRecord& r) {
    json crossings = json::array();
    for (const auto& c : r.crossings) crossings.push_back({{"i", c.i}, {"j", c.j}, {"multiplicity", c.multiplicity}});
    json out = {{"t_star", r.t_star},   {"crossings", crossings}, {"nullity", r.nullity},
                {"epsilon", r.epsilon}, {"certified", r.certified}, {"reason", r.reason}};
    out["n_minus"] = r.n_minus ? json(*r.n_minus) : json(nullptr);
    out["n_plus"] = r.n_plus ? json(*r.n_plus) : json(nullptr);
    return out;
}

std::string directory_of(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    const std::filesystem::path p(path);
    return p.is_absolute() || base_dir.empty() ? path : (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_slice_csv(std::ostream& out, const SpectrumSlice& slice) {
    out << "j,rho\n";
    for (Index j = 0; j < slice.eigenvalues.size(); ++j) out << j << ',' << format_real(slice.eigenvalues(j)) << '\n';
}

std::vector<std::pair<int, double>> read_slice_csv(std::istream& in) {
    std::vector<std::pair<int, double>> rows;
    for (const auto& f : read_csv_rows(in, "j,rho")) rows.emplace_back(parse_int(f[0]), parse_real(f[1]));
    return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<EigenCurve>& curves) {
    out << "t,i,j,rho\n";
    for (const auto& curve : curves) {
        for (const auto& [t, rho] : curve.samples) {
            out << format_real(t) << ',' << curve.factor_index << ',' << curve.branch_index << ',' << format_real(rho)
                << '\n';
        }
    }
}

std::vector<EigenCurve> read_curves_csv(std::istream& in) {
    std::vector<EigenCurve> curves;
    for (const auto& f : read_csv_rows(in, "t,i,j,rho")) {
        const int i = parse_int(f[1]);
        const int j = parse_int(f[2]);
        if (curves.empty() || curves.back().factor_index != i || curves.back().branch_index != j) {
            curves.push_back(EigenCurve{i, j, {}});
        }
        curves.back().samples.emplace_back(parse_real(f[0]), parse_real(f[3]));
    }
    return curves;
}

void write_jacobi_csv(std::ostream& out, const JacobiSlice& slice) {
    out << "i,j,rho,jacobi_value,multiplicity\n";
    for (const auto& e : slice.entries) {
        out << e.i << ',' << e.j << ',' << format_real(e.rho) << ',' << format_real(e.jacobi_value) << ','
            << e.multiplicity << '\n';
    }
}

std::vector<JacobiEntry> read_jacobi_csv(std::istream& in) {
    std::vector<JacobiEntry> entries;
    for (const auto& f : read_csv_rows(in, "i,j,rho,jacobi_value,multiplicity")) {
        entries.push_back(JacobiEntry{parse_int(f[0]), parse_int(f[1]), parse_real(f[2]), parse_real(f[3]),
                                      parse_int(f[4])});
    }
    return entries;
}

std::string records_to_json(const std::vector<DegeneracyRecord>& records) {
    json doc = json::array();
    for (const auto& r : records) doc.push_back(record_to_json(r));
    return doc.dump(2);
}

std::vector<DegeneracyRecord> records_from_json(const std::string& text) {
    std::vector<DegeneracyRecord> records;
    try {
        const auto doc = json::parse(text);
        for (const auto& item : doc) {
            DegeneracyRecord r;
            r.t_star = item.at("t_star").get<double>();
            for (const auto& c : item.at("crossings")) {
                r.crossings.push_back(Crossing{c.at("i").get<int>(), c.at("j").get<int>(),
                                               c.at("multiplicity").get<int>()});
            }
            r.nullity = item.value("nullity", 0);
            r.epsilon = item.value("epsilon", 0.0);
            r.certified = item.value("certified", false);
            r.reason = item.value("reason", std::string());
            if (item.contains("n_minus") && !item["n_minus"].is_null()) r.n_minus = item["n_minus"].get<int>();
            if (item.contains("n_plus") && !item["n_plus"].is_null()) r.n_plus = item["n_plus"].get<int>();
            if (r.crossings.empty()) throw precondition_error("parse_error", "record without crossings");
            records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw precondition_error("parse_error", std::string("records JSON: ") + e.what());
    }
    return records;
}

void write_records_csv(std::ostream& out, const std::vector<DegeneracyRecord>& records) {
    out << "t_star,i,j,multiplicity,nullity,n_minus,n_plus,certified\n";
    for (const auto& r : records) {
        for (const auto& c : r.crossings) {
            out << format_real(r.t_star) << ',' << c.i << ',' << c.j << ',' << c.multiplicity << ',' << r.nullity
                << ',' << (r.n_minus ? std::to_string(*r.n_minus) : "") << ','
                << (r.n_plus ? std::to_string(*r.n_plus) : "") << ',' << (r.certified ? 1 : 0) << '\n';
        }
    }
}

std::vector<DegeneracyRecord> read_records_csv(std::istream& in) {
    std::vector<DegeneracyRecord> records;
    for (const auto& f : read_csv_rows(in, "t_star,i,j,multiplicity,nullity,n_minus,n_plus,certified")) {
        const double t = parse_real(f[0]);
        if (records.empty() || records.back().t_star != t) {
            DegeneracyRecord r;
            r.t_star = t;
            r.nullity = parse_int(f[4]);
            if (!f[5].empty()) r.n_minus = parse_int(f[5]);
            if (!f[6].empty()) r.n_plus = parse_int(f[6]);
            r.certified = parse_int(f[7]) != 0;
            records.push_back(std::move(r));
        }
        records.back().crossings.push_back(Crossing{parse_int(f[1]), parse_int(f[2]), parse_int(f[3])});
    }
    return records;
}

Mesh resolve_mesh(const std::string& spec, const std::string& base_dir, OracleGeometry* geometry) {
    OracleGeometry geo;
    Mesh mesh;
    const std::string prefix = "builtin:";
    if (spec.rfind(prefix, 0) == 0) {
        std::vector<std::string> parts;
        std::istringstream in(spec.substr(prefix.size()));
        for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
        if (parts.size() == 2 && parts[0] == "disk") {
            mesh = generate_disk(parse_int(parts[1]));
            geo.kind = OracleGeometry::Kind::UnitDisk;
        } else if (parts.size() == 3 && parts[0] == "interval") {
            geo.length = parse_real(parts[2]);
            mesh = generate_interval(parse_int(parts[1]), geo.length);
            geo.kind = OracleGeometry::Kind::Interval;
        } else {
            throw precondition_error("parse_error",
                                     "unknown builtin mesh '" + spec +
                                         "' (use builtin:disk:<level> or builtin:interval:<cells>:<length>)");
        }
    } else {
        mesh = load_mesh(resolve_path(spec, base_dir));
    }
    if (geometry != nullptr) *geometry = geo;
    return mesh;
}

ModelConfig parse_model_config(const std::string& text, const std::string& base_dir) {
    ModelConfig config;
    config.text = text;
    config.base_dir = base_dir;
    try {
        const auto doc = json::parse(text);
        const auto& factor_doc = doc.at("factor");
        ClosedFactorSpectrum factor;
        if (factor_doc.contains("flat_torus")) {
            const auto& torus = factor_doc.at("flat_torus");
            const auto rows = torus.at("basis").get<std::vector<std::vector<double>>>();
            Eigen::MatrixXd basis(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.size()) throw precondition_error("parse_error", "lattice basis must be square");
                for (std::size_t c = 0; c < rows.size(); ++c) basis(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
            }
            factor = flat_torus_spectrum(basis, torus.at("cutoff").get<double>());
        } else if (factor_doc.contains("file")) {
            factor = parse_factor_json(read_text_file(resolve_path(factor_doc.at("file").get<std::string>(), base_dir)));
        } else {
            factor = parse_factor_json(factor_doc.dump());
        }

        Mesh mesh = resolve_mesh(doc.at("mesh").get<std::string>(), base_dir, &config.geometry);
        if (doc.contains("m1") && doc.at("m1").get<int>() != factor.dim) {
            throw precondition_error("invalid_argument", "m1 does not match the factor spectrum dimension");
        }
        if (doc.contains("m2") && doc.at("m2").get<int>() != mesh.dim) {
            throw precondition_error("invalid_argument", "m2 does not match the mesh dimension");
        }

        SolverOptions solver;
        if (doc.contains("solver")) {
            const auto& s = doc.at("solver");
            solver.dense_threshold = s.value("dense_threshold", solver.dense_threshold);
            solver.tolerance = s.value("tolerance", solver.tolerance);
            solver.max_iterations = s.value("max_iterations", solver.max_iterations);
        }
        if (doc.contains("degeneracy_tol")) {
            config.degeneracy_tol = doc.at("degeneracy_tol").get<double>();
            if (!(*config.degeneracy_tol > 0.0)) {
                throw precondition_error("invalid_argument", "degeneracy_tol must be positive");
            }
        }
        config.model = make_product_model(std::move(factor), std::move(mesh), doc.at("H2").get<double>(), solver);
    } catch (const json::exception& e) {
        throw precondition_error("parse_error", std::string("model config: ") + e.what());
    }
    return config;
}

ModelConfig load_model_config(const std::string& path) {
    return parse_model_config(read_text_file(path), directory_of(path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("io_error", "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw precondition_error("io_error", "cannot write " + path);
    out << content;
}

}  // namespace steklov
