#include "steklov/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "steklov/errors.hpp"

namespace steklov {

namespace {

double branch_value(const ProductModel& model, double rho_i, int j, double t) {
    const SpectrumSlice slice = robin_steklov_spectrum(model.forms, t * rho_i, j + 1, model.solver);
    return slice.eigenvalues(j);
}

// Root of the strictly increasing t ↦ ρ^{(i)}_j(t) − Ĥ on [lo, hi], given
// ρ(lo) ≤ Ĥ ≤ ρ(hi).
double bisect_branch(const ProductModel& model, double rho_i, int j, double lo, double hi,
                     const BifurcationOptions& options) {
    while (hi - lo > options.root_rtol * lo) {
        const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (branch_value(model, rho_i, j, mid) < model.Hhat) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double tolerance_for(const ProductModel& model, const BifurcationOptions& options) {
    return options.degeneracy_tol > 0.0 ? options.degeneracy_tol : default_degeneracy_tolerance(model);
}

struct Root {
    double t;
    Crossing crossing;
};

void verify_root(const ProductModel& model, const Root& root, const BifurcationOptions& options) {
    const double rho = branch_value(model, model.factor[static_cast<std::size_t>(root.crossing.i)].value,
                                    root.crossing.j, root.t);
    if (std::abs(rho - model.Hhat) > options.verify_rtol * model.Hhat) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "root check failed for branch (" << root.crossing.i << ", " << root.crossing.j << ") at t = " << root.t
            << ": rho = " << rho << ", Hhat = " << model.Hhat;
        throw numerical_error("root_verification_failed", msg.str());
    }
}

}  // namespace

int DegeneracyRecord::total_multiplicity() const {
    int total = 0;
    for (const auto& c : crossings) total += c.multiplicity;
    return total;
}

double find_degeneracy_instant(const ProductModel& model, int i, std::pair<double, double> bracket,
                               const BifurcationOptions& options) {
    if (model.Hhat <= 0.0) {
        throw precondition_error("no_degeneracy_instants", "no degeneracy instants exist when Hhat <= 0");
    }
    if (i < 1 || static_cast<std::size_t>(i) >= model.factor.size()) {
        throw precondition_error("invalid_argument", "factor index " + std::to_string(i) + " is out of range");
    }
    auto [lo, hi] = bracket;
    if (!(lo > 0.0) || !(hi > lo)) throw precondition_error("invalid_argument", "bracket must satisfy 0 < t_lo < t_hi");

    const double rho_i = model.factor[static_cast<std::size_t>(i)].value;
    int steps = 0;
    while (branch_value(model, rho_i, 0, lo) >= model.Hhat) {
        if (++steps > options.max_bracket_steps) {
            throw numerical_error("bracket_exhausted", "could not find t_lo with rho_0 below Hhat");
        }
        lo *= 0.5;
    }
    steps = 0;
    while (branch_value(model, rho_i, 0, hi) <= model.Hhat) {
        if (++steps > options.max_bracket_steps) {
            throw numerical_error("bracket_exhausted", "could not find t_hi with rho_0 above Hhat");
        }
        hi *= 2.0;
    }
    const double t = bisect_branch(model, rho_i, 0, lo, hi, options);
    verify_root(model, Root{t, Crossing{i, 0, model.factor[static_cast<std::size_t>(i)].multiplicity}}, options);
    return t;
}

std::vector<DegeneracyRecord> enumerate_instants(const ProductModel& model, double t_min, double t_max,
                                                 const BifurcationOptions& options) {
    if (!(t_min > 0.0) || !(t_max > t_min)) {
        throw precondition_error("invalid_argument", "instant search needs 0 < t_min < t_max");
    }
    if (model.Hhat <= 0.0) return {};
    if (is_steklov_eigenvalue(model.forms, model.Hhat, model.solver)) {
        throw precondition_error("hhat_is_steklov_eigenvalue",
                                 "Hhat is a Steklov eigenvalue of the boundary factor; the Jacobi operator is "
                                 "degenerate for every t");
    }

    std::vector<Root> roots;
    bool closed = false;
    for (std::size_t i = 1; i < model.factor.size(); ++i) {
        const double rho_i = model.factor[i].value;
        const Eigen::VectorXd at_min = eigenvalues_up_to(model.forms, t_min * rho_i, model.Hhat, model.solver);
        if (at_min(0) > model.Hhat) {
            closed = true;  // every larger i starts above Ĥ as well
            break;
        }
        // Branches below Ĥ at t_min; each crosses at most once since it is
        // strictly increasing in t.
        Index below = 0;
        while (below < at_min.size() && at_min(below) <= model.Hhat) ++below;
        const SpectrumSlice at_max = robin_steklov_spectrum(model.forms, t_max * rho_i, below, model.solver);
        for (Index j = 0; j < below; ++j) {
            if (at_max.eigenvalues(j) < model.Hhat) continue;
            const double t = bisect_branch(model, rho_i, static_cast<int>(j), t_min, t_max, options);
            roots.push_back(Root{t, Crossing{static_cast<int>(i), static_cast<int>(j), model.factor[i].multiplicity}});
        }
    }
    if (!closed) {
        const SpectrumSlice bound = robin_steklov_spectrum(model.forms, t_min * model.factor.cutoff, 1, model.solver);
        if (!(bound.eigenvalues(0) > model.Hhat)) {
            throw precondition_error("cutoff_exhausted",
                                     "factor spectrum cutoff " + std::to_string(model.factor.cutoff) +
                                         " is too small to enumerate instants down to t = " + std::to_string(t_min));
        }
    }

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.t != b.t) return a.t > b.t;
        return a.crossing.i != b.crossing.i ? a.crossing.i < b.crossing.i : a.crossing.j < b.crossing.j;
    });

    std::vector<DegeneracyRecord> records;
    double t_sum = 0.0;
    for (const Root& root : roots) {
        verify_root(model, root, options);
        if (!records.empty() &&
            records.back().t_star - root.t <= options.merge_rtol * records.back().t_star) {
            records.back().crossings.push_back(root.crossing);
            t_sum += root.t;
            continue;
        }
        if (!records.empty()) records.back().t_star = t_sum / static_cast<double>(records.back().crossings.size());
        DegeneracyRecord record;
        record.t_star = root.t;
        record.crossings.push_back(root.crossing);
        records.push_back(std::move(record));
        t_sum = root.t;
    }
    if (!records.empty()) records.back().t_star = t_sum / static_cast<double>(records.back().crossings.size());

    const double tol = tolerance_for(model, options);
    for (auto& record : records) record.nullity = nullity(model, record.t_star, tol).count;
    return records;
}

DegeneracyRecord certify_bifurcation(const ProductModel& model, DegeneracyRecord record, double epsilon,
                                     const BifurcationOptions& options) {
    if (!(epsilon > 0.0)) throw precondition_error("invalid_argument", "epsilon must be positive");
    const double t_star = record.t_star;
    record.certified = false;
    record.reason.clear();
    record.n_minus.reset();
    record.n_plus.reset();
    if (model.Hhat > 0.0 && is_steklov_eigenvalue(model.forms, model.Hhat, model.solver)) {
        record.reason = "hhat_is_steklov_eigenvalue";
        return record;
    }

    double eps = std::min(epsilon, 0.5 * t_star);
    for (int halving = 0;; ++halving) {
        if (halving > options.max_epsilon_halvings) {
            throw numerical_error("epsilon_exhausted",
                                  "instants too close to isolate t* = " + std::to_string(t_star));
        }
        const auto nearby = enumerate_instants(model, t_star - eps, t_star + eps, options);
        const bool isolated = std::all_of(nearby.begin(), nearby.end(), [&](const DegeneracyRecord& r) {
            return std::abs(r.t_star - t_star) <= options.merge_rtol * t_star;
        });
        if (isolated) break;
        eps *= 0.5;
    }
    record.epsilon = eps;

    const double tol = tolerance_for(model, options);
    try {
        record.n_minus = morse_index(model, t_star - eps, tol).count;
        record.n_plus = morse_index(model, t_star + eps, tol).count;
    } catch (const Error& e) {
        if (e.code() != "degenerate_at_t") throw;
        record.reason = "degenerate_endpoint";
        return record;
    }
    record.certified = *record.n_minus != *record.n_plus;
    if (!record.certified) record.reason = "no_index_jump";
    return record;
}

std::vector<double> default_epsilons(const std::vector<DegeneracyRecord>& records) {
    std::vector<double> eps(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double t = records[k].t_star;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t other = 0; other < records.size(); ++other) {
            if (other != k) gap = std::min(gap, std::abs(records[other].t_star - t));
        }
        eps[k] = std::min(0.5 * gap, 0.05 * t);
    }
    return eps;
}

std::vector<DegeneracyRecord> certify_all(const ProductModel& model, std::vector<DegeneracyRecord> records,
                                          std::optional<double> epsilon, const BifurcationOptions& options) {
    const auto eps = default_epsilons(records);
    for (std::size_t k = 0; k < records.size(); ++k) {
        records[k] = certify_bifurcation(model, std::move(records[k]), epsilon.value_or(eps[k]), options);
    }
    return records;
}

Classification classify(const ProductModel& model, double t, double tol) {
    return nullity(model, t, tol).count > 0 ? Classification::Degenerate : Classification::Rigid;
}

Classification classify(const ProductModel& model, double t) {
    return classify(model, t, default_degeneracy_tolerance(model));
}

const char* to_string(Classification c) {
    return c == Classification::Rigid ? "rigid" : "degenerate";
}

}  // namespace steklov
