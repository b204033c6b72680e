#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steklov/product.hpp"

namespace steklov {

/// Branch (i, j) with ρ^{(i)}_j(t*) = Ĥ; multiplicity counts the closed-factor
/// multiplicity μ⁽ⁱ⁾.
struct Crossing {
    int i = 0;
    int j = 0;
    int multiplicity = 0;
};

/// A degeneracy instant t* of the family g_t and, once certified, the Morse
/// indices on both sides.
struct DegeneracyRecord {
    double t_star = 0.0;
    std::vector<Crossing> crossings;
    int nullity = 0;
    std::optional<int> n_minus;  ///< Morse index at t* − ε
    std::optional<int> n_plus;   ///< Morse index at t* + ε
    double epsilon = 0.0;
    bool certified = false;
    std::string reason;  ///< why certification was refused, empty otherwise

    int total_multiplicity() const;
};

struct BifurcationOptions {
    double root_rtol = 1e-8;    ///< bisection stops when the t bracket is this narrow (relative)
    double merge_rtol = 1e-6;   ///< roots closer than this (relative in t) form one record
    double verify_rtol = 1e-6;  ///< post hoc check |ρ(t*) − Ĥ| ≤ verify_rtol·Ĥ
    double degeneracy_tol = 0.0;  ///< 0 selects default_degeneracy_tolerance(model)
    int max_bracket_steps = 60;
    int max_epsilon_halvings = 40;
};

/// Unique t_i with ρ^{(i)}_0(t_i) = Ĥ for a factor index i ≥ 1, by bisection.
/// The bracket is widened (t_lo halved, t_hi doubled) until it encloses the
/// root. Throws "no_degeneracy_instants" when Ĥ ≤ 0 and "bracket_exhausted"
/// when widening fails.
double find_degeneracy_instant(const ProductModel& model, int i, std::pair<double, double> bracket,
                               const BifurcationOptions& options = {});

/// Every t in [t_min, t_max] where some branch ρ^{(i)}_j(t), i ≥ 1, equals Ĥ,
/// sorted by decreasing t; coincident roots are merged. Empty when Ĥ ≤ 0.
/// Records come back uncertified. Throws "hhat_is_steklov_eigenvalue" when Ĥ
/// is a Steklov eigenvalue of the boundary factor and "cutoff_exhausted" when
/// the factor spectrum cannot bound the scan.
std::vector<DegeneracyRecord> enumerate_instants(const ProductModel& model, double t_min, double t_max,
                                                 const BifurcationOptions& options = {});

/// Morse-index jump test across [t* − ε, t* + ε]. ε is halved until the window
/// holds no other instant ("epsilon_exhausted" otherwise). Certified when both
/// endpoints are nondegenerate and the indices differ.
DegeneracyRecord certify_bifurcation(const ProductModel& model, DegeneracyRecord record, double epsilon,
                                     const BifurcationOptions& options = {});

/// Half the gap to the nearest neighbouring instant, capped at 0.05·t*.
std::vector<double> default_epsilons(const std::vector<DegeneracyRecord>& records);

/// Certifies each record with its default ε, or with `epsilon` when given.
std::vector<DegeneracyRecord> certify_all(const ProductModel& model, std::vector<DegeneracyRecord> records,
                                          std::optional<double> epsilon = std::nullopt,
                                          const BifurcationOptions& options = {});

enum class Classification { Rigid, Degenerate };

/// Degenerate iff the nullity at t is positive. A nondegenerate t cannot be a
/// bifurcation instant, so it is locally rigid.
Classification classify(const ProductModel& model, double t, double tol);
Classification classify(const ProductModel& model, double t);

const char* to_string(Classification c);

}  // namespace steklov
