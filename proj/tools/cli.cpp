#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "steklov/bifurcation.hpp"
#include "steklov/errors.hpp"
#include "steklov/oracle.hpp"
#include "steklov/report_io.hpp"

namespace steklov::cli {

namespace {

using nlohmann::json;

// Flags shared by every command that builds a product model. Each one, when
// given, replaces the matching key of the config document.
struct ModelFlags {
    std::string model_path;
    std::optional<std::string> mesh;
    std::optional<double> H2;
    std::optional<double> tol;

    void attach(CLI::App& app, bool model_required = true) {
        auto* opt = app.add_option("--model", model_path, "model config (JSON)");
        if (model_required) opt->required();
        app.add_option("--mesh", mesh, "override the mesh (path or builtin:disk:<level>)");
        app.add_option("--h2", H2, "override H2");
        app.add_option("--tol", tol, "override the degeneracy tolerance");
    }
};

struct Loaded {
    json doc;  // config after flag overrides
    ModelConfig config;
};

Loaded load_model(const ModelFlags& flags) {
    json doc;
    try {
        doc = json::parse(read_text_file(flags.model_path));
    } catch (const json::exception& e) {
        throw precondition_error("parse_error", flags.model_path + ": " + e.what());
    }
    if (flags.mesh) doc["mesh"] = *flags.mesh;
    if (flags.H2) doc["H2"] = *flags.H2;
    if (flags.tol) doc["degeneracy_tol"] = *flags.tol;
    const auto dir = std::filesystem::path(flags.model_path).parent_path();
    Loaded loaded{doc, parse_model_config(doc.dump(), dir.empty() ? "." : dir.string())};
    return loaded;
}

template <class T>
T pick(const std::optional<T>& flag, const json& doc, const char* key, const T& fallback) {
    if (flag) return *flag;
    if (doc.contains(key)) {
        try {
            return doc.at(key).get<T>();
        } catch (const json::exception& e) {
            throw precondition_error("parse_error", std::string("config key '") + key + "': " + e.what());
        }
    }
    return fallback;
}

void require_t_range(double t_min, double t_max) {
    if (!(t_min > 0.0) || !(t_max > t_min)) {
        throw precondition_error("invalid_argument", "t range must satisfy 0 < t_min < t_max");
    }
}

BifurcationOptions bifurcation_options(const ModelConfig& config) {
    BifurcationOptions options;
    if (config.degeneracy_tol) options.degeneracy_tol = *config.degeneracy_tol;
    return options;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw precondition_error("io_error", "cannot write " + path);
    return out;
}

std::string prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw precondition_error("io_error", "cannot create directory " + dir + ": " + ec.message());
    return dir;
}

std::string join(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

// Closed-form comparison for builtin geometries.
struct OracleDelta {
    double t_star = 0.0;
    int i = 0;
    int j = 0;
    std::optional<double> t_oracle;
    std::optional<double> relative_delta;
};

std::optional<oracle::OracleBranch> oracle_branch(const OracleGeometry& geometry, int j) {
    switch (geometry.kind) {
        case OracleGeometry::Kind::UnitDisk:
            return oracle::OracleBranch::disk((j + 1) / 2);
        case OracleGeometry::Kind::Interval:
            if (j > 1) return std::nullopt;
            return oracle::OracleBranch::interval(j == 0 ? oracle::Parity::Even : oracle::Parity::Odd,
                                                  geometry.length);
        case OracleGeometry::Kind::None:
            break;
    }
    return std::nullopt;
}

void require_oracle(const ModelConfig& config) {
    if (config.geometry.kind == OracleGeometry::Kind::None) {
        throw precondition_error("oracle_unavailable", "--oracle needs a builtin disk or interval mesh");
    }
}

std::vector<OracleDelta> oracle_deltas(const ModelConfig& config, const std::vector<DegeneracyRecord>& records) {
    require_oracle(config);
    std::vector<OracleDelta> deltas;
    for (const auto& r : records) {
        for (const auto& c : r.crossings) {
            OracleDelta d{r.t_star, c.i, c.j, std::nullopt, std::nullopt};
            if (auto branch = oracle_branch(config.geometry, c.j)) {
                try {
                    const double c_star = oracle::solve_branch_root(*branch, config.model.Hhat);
                    d.t_oracle = c_star / config.model.factor[static_cast<std::size_t>(c.i)].value;
                    d.relative_delta = (r.t_star - *d.t_oracle) / *d.t_oracle;
                } catch (const std::domain_error&) {
                    // root outside the evaluation window; left blank
                }
            }
            deltas.push_back(d);
        }
    }
    return deltas;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleDelta>& deltas) {
    out << "t_star,i,j,t_oracle,relative_delta\n";
    for (const auto& d : deltas) {
        out << format_real(d.t_star) << ',' << d.i << ',' << d.j << ','
            << (d.t_oracle ? format_real(*d.t_oracle) : "") << ','
            << (d.relative_delta ? format_real(*d.relative_delta) : "") << '\n';
    }
}

json oracle_to_json(const ModelConfig& config, const std::vector<OracleDelta>& deltas) {
    json rows = json::array();
    for (const auto& d : deltas) {
        rows.push_back({{"t_star", d.t_star},
                        {"i", d.i},
                        {"j", d.j},
                        {"t_oracle", d.t_oracle ? json(*d.t_oracle) : json(nullptr)},
                        {"relative_delta", d.relative_delta ? json(*d.relative_delta) : json(nullptr)}});
    }
    return {{"geometry", config.geometry.kind == OracleGeometry::Kind::UnitDisk ? "unit_disk" : "interval"},
            {"deltas", rows}};
}

std::vector<DegeneracyRecord> load_records(const std::string& path) {
    const std::string text = read_text_file(path);
    if (std::filesystem::path(path).extension() == ".csv") {
        std::istringstream in(text);
        return read_records_csv(in);
    }
    return records_from_json(text);
}

// -- commands ---------------------------------------------------------------

struct SteklovCmd {
    ModelFlags flags;
    std::optional<int> k;
    double c = 0.0;
    std::string out_path;

    void attach(CLI::App& app) {
        app.add_option("--mesh", flags.mesh, "mesh path or builtin:disk:<level> / builtin:interval:<cells>:<L>");
        app.add_option("--model", flags.model_path, "take the mesh from a model config");
        app.add_option("-k", k, "number of eigenvalues (default: up to 8)");
        app.add_option("--c", c, "bulk coefficient of the Robin-Steklov problem")->check(CLI::NonNegativeNumber);
        app.add_option("--out", out_path, "CSV destination (default stdout)");
    }

    int run(std::ostream& out) const {
        std::string spec;
        std::string base = ".";
        if (flags.mesh) {
            spec = *flags.mesh;
        } else if (!flags.model_path.empty()) {
            const json doc = json::parse(read_text_file(flags.model_path), nullptr, false);
            if (doc.is_discarded() || !doc.contains("mesh") || !doc["mesh"].is_string()) {
                throw precondition_error("parse_error", flags.model_path + ": no mesh entry");
            }
            spec = doc["mesh"].get<std::string>();
            const auto dir = std::filesystem::path(flags.model_path).parent_path();
            if (!dir.empty()) base = dir.string();
        } else {
            throw precondition_error("invalid_argument", "steklov needs --mesh or --model");
        }
        const AssembledForms forms = assemble(resolve_mesh(spec, base));
        const Index n_boundary = static_cast<Index>(forms.boundary_dofs.size());
        const Index count = k ? *k : std::min<Index>(8, n_boundary);
        const SpectrumSlice slice = robin_steklov_spectrum(forms, c, count);
        if (out_path.empty()) {
            write_slice_csv(out, slice);
        } else {
            auto file = open_output(out_path);
            write_slice_csv(file, slice);
        }
        return kOk;
    }
};

struct EigencurveCmd {
    ModelFlags flags;
    std::vector<int> i_list{0};
    std::vector<int> j_list{0};
    std::optional<double> t_min, t_max;
    std::optional<int> t_steps;
    bool log_grid = false;
    std::string out_path;

    void attach(CLI::App& app) {
        flags.attach(app);
        app.add_option("--i", i_list, "factor indices, comma separated")->delimiter(',');
        app.add_option("--j", j_list, "branch indices, comma separated")->delimiter(',');
        app.add_option("--t-min", t_min);
        app.add_option("--t-max", t_max);
        app.add_option("--t-steps", t_steps, "grid size (at least 2)");
        app.add_flag("--log", log_grid, "geometric t grid");
        app.add_option("--out", out_path, "CSV destination (default stdout)");
    }

    int run(std::ostream& out) const {
        const Loaded loaded = load_model(flags);
        const ProductModel& model = loaded.config.model;
        const double lo = pick(t_min, loaded.doc, "t_min", 0.1);
        const double hi = pick(t_max, loaded.doc, "t_max", 10.0);
        const int steps = pick(t_steps, loaded.doc, "t_steps", 50);
        require_t_range(lo, hi);
        if (steps < 2) throw precondition_error("invalid_argument", "t-steps must be at least 2");

        std::vector<double> grid(static_cast<std::size_t>(steps));
        for (int s = 0; s < steps; ++s) {
            const double u = static_cast<double>(s) / (steps - 1);
            grid[static_cast<std::size_t>(s)] = log_grid ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
        }
        std::vector<EigenCurve> curves;
        for (int i : i_list) {
            if (i < 0 || static_cast<std::size_t>(i) >= model.factor.size()) {
                throw precondition_error("invalid_argument", "factor index " + std::to_string(i) + " out of range");
            }
            for (int j : j_list) {
                if (j < 0) throw precondition_error("invalid_argument", "branch index must be non-negative");
                curves.push_back(trace_eigencurve(model.forms, model.factor[static_cast<std::size_t>(i)].value, j,
                                                  grid, i, model.solver));
            }
        }
        if (out_path.empty()) {
            write_curves_csv(out, curves);
        } else {
            auto file = open_output(out_path);
            write_curves_csv(file, curves);
        }
        return kOk;
    }
};

struct InstantsCmd {
    ModelFlags flags;
    std::optional<double> t_min, t_max;
    bool oracle = false;
    bool no_certify = false;
    std::string out_dir;

    void attach(CLI::App& app) {
        flags.attach(app);
        app.add_option("--t-min", t_min);
        app.add_option("--t-max", t_max);
        app.add_flag("--oracle", oracle, "compare against closed-form instants (builtin meshes)");
        app.add_flag("--no-certify", no_certify, "skip the Morse-index certification");
        app.add_option("--out", out_dir, "directory for instants.json / instants.csv (default: CSV on stdout)");
    }

    int run(std::ostream& out, std::ostream& err) const {
        const Loaded loaded = load_model(flags);
        const ModelConfig& config = loaded.config;
        const double lo = pick(t_min, loaded.doc, "t_min", 0.05);
        const double hi = pick(t_max, loaded.doc, "t_max", 10.0);
        require_t_range(lo, hi);
        if (oracle) require_oracle(config);
        const auto options = bifurcation_options(config);
        auto records = enumerate_instants(config.model, lo, hi, options);
        if (!no_certify) records = certify_all(config.model, std::move(records), std::nullopt, options);

        std::vector<OracleDelta> deltas;
        if (oracle) deltas = oracle_deltas(config, records);
        if (out_dir.empty()) {
            write_records_csv(out, records);
            if (oracle) {
                std::ostringstream table;
                write_oracle_csv(table, deltas);
                err << table.str();
            }
            return kOk;
        }
        prepare_dir(out_dir);
        write_text_file(join(out_dir, "instants.json"), records_to_json(records));
        auto csv = open_output(join(out_dir, "instants.csv"));
        write_records_csv(csv, records);
        if (oracle) {
            auto file = open_output(join(out_dir, "oracle.csv"));
            write_oracle_csv(file, deltas);
        }
        return kOk;
    }
};

struct CertifyCmd {
    ModelFlags flags;
    std::string instants_path;
    std::optional<double> epsilon;
    std::string out_dir;

    void attach(CLI::App& app) {
        flags.attach(app);
        app.add_option("--instants", instants_path, "records from `instants` (.json or .csv)")->required();
        app.add_option("--epsilon", epsilon, "half-width of the index window");
        app.add_option("--out", out_dir, "directory for certified.json / certified.csv (default: CSV on stdout)");
    }

    int run(std::ostream& out) const {
        const Loaded loaded = load_model(flags);
        std::optional<double> eps = epsilon;
        if (!eps && loaded.doc.contains("epsilon")) eps = pick<double>(std::nullopt, loaded.doc, "epsilon", 0.0);
        if (eps && !(*eps > 0.0)) throw precondition_error("invalid_argument", "epsilon must be positive");
        auto records = certify_all(loaded.config.model, load_records(instants_path), eps,
                                   bifurcation_options(loaded.config));
        if (out_dir.empty()) {
            write_records_csv(out, records);
            return kOk;
        }
        prepare_dir(out_dir);
        write_text_file(join(out_dir, "certified.json"), records_to_json(records));
        auto csv = open_output(join(out_dir, "certified.csv"));
        write_records_csv(csv, records);
        return kOk;
    }
};

struct ReportCmd {
    ModelFlags flags;
    std::optional<double> t_min, t_max;
    std::optional<int> t_steps;
    bool oracle = false;
    std::string out_dir;

    void attach(CLI::App& app) {
        flags.attach(app);
        app.add_option("--t-min", t_min);
        app.add_option("--t-max", t_max);
        app.add_option("--t-steps", t_steps, "samples per curve in curves.csv");
        app.add_flag("--oracle", oracle, "include closed-form deltas (builtin meshes)");
        app.add_option("--out", out_dir, "output directory")->required();
    }

    int run() const {
        const Loaded loaded = load_model(flags);
        const ModelConfig& config = loaded.config;
        const ProductModel& model = config.model;
        const double lo = pick(t_min, loaded.doc, "t_min", 0.05);
        const double hi = pick(t_max, loaded.doc, "t_max", 10.0);
        const int steps = pick(t_steps, loaded.doc, "t_steps", 40);
        const bool with_oracle = oracle || pick<bool>(std::nullopt, loaded.doc, "oracle", false);
        require_t_range(lo, hi);
        if (steps < 2) throw precondition_error("invalid_argument", "t-steps must be at least 2");
        if (with_oracle) require_oracle(config);

        const auto options = bifurcation_options(config);
        const double tol = options.degeneracy_tol > 0.0 ? options.degeneracy_tol : default_degeneracy_tolerance(model);
        auto records = certify_all(model, enumerate_instants(model, lo, hi, options), std::nullopt, options);

        // Morse index on each interval between consecutive instants.
        std::vector<double> probes{hi};
        for (const auto& r : records) probes.push_back(r.t_star);
        probes.push_back(lo);
        json indices = json::array();
        for (std::size_t p = 0; p + 1 < probes.size(); ++p) {
            const double t = std::sqrt(probes[p] * probes[p + 1]);
            const IndexCount index = morse_index(model, t, tol);
            indices.push_back({{"t", t},
                               {"morse_index", index.count},
                               {"classification", to_string(classify(model, t, tol))},
                               {"truncation", index.certificate.summary()}});
        }

        json report = {
            {"model",
             {{"m1", model.m1},
              {"m2", model.m2},
              {"m", model.m()},
              {"H2", model.H2},
              {"Hhat", model.Hhat},
              {"factor_eigenvalues", model.factor.size()},
              {"factor_cutoff", model.factor.cutoff},
              {"mesh",
               {{"spec", loaded.doc.value("mesh", std::string())},
                {"vertices", model.mesh.vertices.rows()},
                {"cells", model.mesh.cells.size()},
                {"boundary_dofs", model.forms.boundary_dofs.size()}}}}},
            {"t_min", lo},
            {"t_max", hi},
            {"degeneracy_tol", tol},
            {"instants", json::parse(records_to_json(records))},
            {"indices", indices}};
        if (with_oracle) report["oracle"] = oracle_to_json(config, oracle_deltas(config, records));

        // First branches of the lowest factor modes, plot-ready.
        std::vector<double> grid(static_cast<std::size_t>(steps));
        for (int s = 0; s < steps; ++s) grid[static_cast<std::size_t>(s)] = lo * std::pow(hi / lo, double(s) / (steps - 1));
        std::vector<EigenCurve> curves;
        const std::size_t modes = std::min<std::size_t>(model.factor.size(), 5);
        for (std::size_t i = 0; i < modes; ++i) {
            curves.push_back(trace_eigencurve(model.forms, model.factor[i].value, 0, grid, static_cast<int>(i),
                                              model.solver));
        }

        prepare_dir(out_dir);
        write_text_file(join(out_dir, "report.json"), report.dump(2) + "\n");
        write_text_file(join(out_dir, "instants.json"), records_to_json(records));
        auto csv = open_output(join(out_dir, "instants.csv"));
        write_records_csv(csv, records);
        auto curves_csv = open_output(join(out_dir, "curves.csv"));
        write_curves_csv(curves_csv, curves);
        return kOk;
    }
};

int fail(std::ostream& err, int status, const std::string& code, const std::string& message) {
    err << "error: " << code << ": " << message << '\n';
    return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steklov spectra and bifurcation instants of product manifolds"};
    app.require_subcommand(1);
    SteklovCmd steklov_cmd;
    EigencurveCmd eigencurve_cmd;
    InstantsCmd instants_cmd;
    CertifyCmd certify_cmd;
    ReportCmd report_cmd;
    auto* s1 = app.add_subcommand("steklov", "Robin-Steklov spectrum of a mesh (CSV j,rho)");
    auto* s2 = app.add_subcommand("eigencurve", "branches rho_j^(i)(t) over a t grid (CSV t,i,j,rho)");
    auto* s3 = app.add_subcommand("instants", "degeneracy instants in [t_min, t_max]");
    auto* s4 = app.add_subcommand("certify", "Morse-index certification of given instants");
    auto* s5 = app.add_subcommand("report", "JSON summary plus plot-ready CSV");
    steklov_cmd.attach(*s1);
    eigencurve_cmd.attach(*s2);
    instants_cmd.attach(*s3);
    certify_cmd.attach(*s4);
    report_cmd.attach(*s5);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, kPrecondition, "usage", e.what());
    }

    try {
        if (s1->parsed()) return steklov_cmd.run(out);
        if (s2->parsed()) return eigencurve_cmd.run(out);
        if (s3->parsed()) return instants_cmd.run(out, err);
        if (s4->parsed()) return certify_cmd.run(out);
        return report_cmd.run();
    } catch (const Error& e) {
        return fail(err, e.kind() == ErrorKind::Precondition ? kPrecondition : kNumerical, e.code(), e.what());
    } catch (const std::domain_error& e) {
        return fail(err, kPrecondition, "domain_error", e.what());
    } catch (const std::exception& e) {
        return fail(err, kNumerical, "internal", e.what());
    }
}

}  // namespace steklov::cli
