#pragma once

#include <string>
#include <vector>

#include "steklov/factors.hpp"
#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

/// Product (M₁ × M₂, g⁽¹⁾ ⊕ t·g⁽²⁾) of a closed factor, known through its
/// spectrum, and a meshed factor with boundary whose boundary has constant
/// mean curvature H2.
struct ProductModel {
    ClosedFactorSpectrum factor;
    Mesh mesh;
    AssembledForms forms;
    int m1 = 0;
    int m2 = 0;
    double H2 = 0.0;
    double Hhat = 0.0;  ///< (m₂ − 1)/(m − 1)·H2
    SolverOptions solver;

    int m() const { return m1 + m2; }
};

/// Assembles the boundary factor and derives Ĥ. Requires m₁ + m₂ ≥ 3 with
/// m₁ = factor.dim and m₂ = mesh.dim.
ProductModel make_product_model(ClosedFactorSpectrum factor, Mesh mesh, double H2,
                                const SolverOptions& solver = {});

/// H_{g_t} = Ĥ/√t.
double mean_curvature_gt(const ProductModel& model, double t);

/// Records why no (i, j) pair left out of a slice can reach the threshold.
///
/// Branches are increasing in j by ordering and ρ^{(i)}_0(t) is increasing
/// in i, so it suffices that (a) for every scanned i the largest computed
/// branch already exceeds the threshold (or all branches were computed), and
/// (b) the first unscanned factor eigenvalue, or the cutoff when the list ran
/// out, has ρ_0 above the threshold.
struct TruncationCertificate {
    double threshold = 0.0;
    int scanned_factor_indices = 0;     ///< i = 0 .. scanned_factor_indices − 1 were examined
    double omitted_bound_c = 0.0;       ///< bulk coefficient of the bounding branch
    double omitted_bound_rho = 0.0;     ///< ρ_0 at omitted_bound_c, > threshold
    bool bound_from_cutoff = false;     ///< bound taken at c = t·cutoff
    std::vector<int> branches_computed; ///< per scanned i
    std::vector<double> largest_computed; ///< per scanned i, the largest branch value computed

    std::string summary() const;
};

struct JacobiEntry {
    int i = 0;
    int j = 0;  ///< first sorted position of the (possibly repeated) eigenvalue
    double rho = 0.0;
    double jacobi_value = 0.0;  ///< (ρ − Ĥ)/√t
    int multiplicity = 0;       ///< μ⁽ⁱ⁾ × multiplicity within the slice
};

/// All Jacobi eigenvalues of the product at t whose branch value ρ^{(i)}_j(t)
/// does not exceed Ĥ + margin, excluding the constant (i, j) = (0, 0).
struct JacobiSlice {
    double t = 0.0;
    double Hhat = 0.0;
    std::vector<JacobiEntry> entries;
    TruncationCertificate certificate;
};

JacobiSlice jacobi_slice(const ProductModel& model, double t, double margin);

struct IndexCount {
    int count = 0;
    TruncationCertificate certificate;
};

/// 1e-6·max(1, Ĥ).
double default_degeneracy_tolerance(const ProductModel& model);

/// Multiplicity-weighted number of branches with ρ^{(i)}_j(t) < Ĥ. Throws a
/// numerical error ("degenerate_at_t") when a branch lies within `tol` of Ĥ.
IndexCount morse_index(const ProductModel& model, double t, double tol);
IndexCount morse_index(const ProductModel& model, double t);

/// Multiplicity-weighted number of branches with |ρ^{(i)}_j(t) − Ĥ| ≤ tol.
IndexCount nullity(const ProductModel& model, double t, double tol);

/// (2/(m−2))·grad_energy + H_g·boundary_l2.
double conformal_mean_curvature_from_integrals(double grad_energy, double boundary_l2, double H_g, int m);

/// Mean curvature of the conformal metric φ^{4/(m−2)} g obtained by partial
/// integration of the boundary Yamabe system. φ is a full-dof nodal vector; it
/// must be discretely harmonic and satisfy ∫_∂ φ^{2(m−1)/(m−2)} = 1, both to
/// `tol` (precondition error otherwise).
double conformal_mean_curvature(const AssembledForms& forms, const Eigen::VectorXd& phi, double H_g, int m,
                                double tol = 1e-8);

/// Euclidean norm of the weak residual of the zero-scalar-curvature Yamabe
/// system: Kφ + (m−2)/2·H_g·Bφ − (m−2)/2·H_candidate·B φ^{m/(m−2)}.
double yamabe_residual(const AssembledForms& forms, const Eigen::VectorXd& phi, double H_candidate, double H_g,
                       int m);

/// The constant function with ∫_∂ φ^{2(m−1)/(m−2)} = 1.
Eigen::VectorXd normalized_constant(const AssembledForms& forms, int m);

/// Homothety of the mesh metric that makes the boundary measure 1; the mean
/// curvature of the rescaled metric is H_g/√t.
struct NormalizedForms {
    AssembledForms forms;
    double t = 1.0;
};
NormalizedForms normalize_boundary_measure(const AssembledForms& forms);

}  // namespace steklov
