#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace steklov {

struct FactorEigenvalue {
    double value = 0.0;
    int multiplicity = 1;
};

/// Distinct Laplace eigenvalues ρ^{(0)} = 0 < ρ^{(1)} < … of a closed,
/// connected manifold, with multiplicities. Every eigenvalue ≤ cutoff is
/// listed; nothing is known above it.
struct ClosedFactorSpectrum {
    int dim = 0;
    std::vector<FactorEigenvalue> entries;
    double cutoff = 0.0;

    std::size_t size() const { return entries.size(); }
    const FactorEigenvalue& operator[](std::size_t i) const { return entries[i]; }
};

/// Spectrum of the flat torus ℝ^m / Γ, Γ spanned by the columns of
/// `lattice_basis`: eigenvalues 4π²|γ*|² over the dual lattice, up to cutoff.
ClosedFactorSpectrum flat_torus_spectrum(const Eigen::MatrixXd& lattice_basis, double cutoff);

/// Validated spectrum from explicit (value, multiplicity) pairs; the cutoff is
/// the last value.
ClosedFactorSpectrum from_list(const std::vector<std::pair<double, int>>& entries, int dim);

/// JSON form: {"dim": m1, "entries": [[value, mult], ...], "cutoff": c}.
ClosedFactorSpectrum parse_factor_json(const std::string& text);
std::string factor_to_json(const ClosedFactorSpectrum& spectrum);

}  // namespace steklov
