#include "steklov/product.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steklov/errors.hpp"

namespace steklov {

namespace {

void require_positive_t(double t) {
    if (!(t > 0.0)) throw precondition_error("invalid_argument", "t must be positive");
}

}  // namespace

ProductModel make_product_model(ClosedFactorSpectrum factor, Mesh mesh, double H2, const SolverOptions& solver) {
    ProductModel model;
    model.m1 = factor.dim;
    model.m2 = mesh.dim;
    if (model.m1 < 1 || model.m2 < 1 || model.m() < 3) {
        throw precondition_error("invalid_argument", "product dimension m1 + m2 must be at least 3");
    }
    if (!std::isfinite(H2)) throw precondition_error("invalid_argument", "H2 must be finite");
    model.H2 = H2;
    model.Hhat = static_cast<double>(model.m2 - 1) / (model.m() - 1) * H2;
    model.forms = assemble(mesh);
    model.factor = std::move(factor);
    model.mesh = std::move(mesh);
    model.solver = solver;
    return model;
}

double mean_curvature_gt(const ProductModel& model, double t) {
    require_positive_t(t);
    return model.Hhat / std::sqrt(t);
}

std::string TruncationCertificate::summary() const {
    std::ostringstream out;
    out.precision(17);
    out << "threshold " << threshold << "; scanned i < " << scanned_factor_indices << "; omitted branches bounded by rho_0("
        << omitted_bound_c << ") = " << omitted_bound_rho << (bound_from_cutoff ? " at the factor cutoff" : "");
    return out.str();
}

JacobiSlice jacobi_slice(const ProductModel& model, double t, double margin) {
    require_positive_t(t);
    if (!(margin >= 0.0)) throw precondition_error("invalid_argument", "margin must be non-negative");
    const double threshold = model.Hhat + margin;
    const double sqrt_t = std::sqrt(t);

    JacobiSlice slice;
    slice.t = t;
    slice.Hhat = model.Hhat;
    slice.certificate.threshold = threshold;

    bool closed = false;
    for (std::size_t i = 0; i < model.factor.size(); ++i) {
        const double c = t * model.factor[i].value;
        const Eigen::VectorXd values = eigenvalues_up_to(model.forms, c, threshold, model.solver);
        auto& cert = slice.certificate;
        cert.scanned_factor_indices = static_cast<int>(i) + 1;
        cert.branches_computed.push_back(static_cast<int>(values.size()));
        cert.largest_computed.push_back(values(values.size() - 1));

        if (i > 0 && values(0) > threshold) {
            // ρ^{(i')}_j(t) ≥ ρ^{(i')}_0(t) ≥ ρ^{(i)}_0(t) for all i' ≥ i.
            cert.omitted_bound_c = c;
            cert.omitted_bound_rho = values(0);
            closed = true;
            break;
        }

        const int mu = model.factor[i].multiplicity;
        Index j = 0;
        while (j < values.size()) {
            Index end = j + 1;
            while (end < values.size() && spectrally_equal(values(end), values(j))) ++end;
            const Index first = (i == 0 && j == 0) ? 1 : j;  // drop the constants
            if (values(j) <= threshold && end > first) {
                JacobiEntry entry;
                entry.i = static_cast<int>(i);
                entry.j = static_cast<int>(first);
                entry.rho = values(first);
                entry.jacobi_value = (entry.rho - model.Hhat) / sqrt_t;
                entry.multiplicity = mu * static_cast<int>(end - first);
                slice.entries.push_back(entry);
            }
            j = end;
        }
    }

    if (!closed) {
        // Unlisted factor eigenvalues exceed the cutoff, so their first branch
        // is bounded below by the branch at c = t·cutoff.
        const double c = t * model.factor.cutoff;
        const SpectrumSlice bound = robin_steklov_spectrum(model.forms, c, 1, model.solver);
        if (!(bound.eigenvalues(0) > threshold)) {
            std::ostringstream msg;
            msg << "cutoff exhausted: factor spectrum (cutoff " << model.factor.cutoff
                << ") is too short to bound the Jacobi spectrum at t = " << t;
            throw precondition_error("cutoff_exhausted", msg.str());
        }
        slice.certificate.omitted_bound_c = c;
        slice.certificate.omitted_bound_rho = bound.eigenvalues(0);
        slice.certificate.bound_from_cutoff = true;
    }
    return slice;
}

double default_degeneracy_tolerance(const ProductModel& model) {
    return 1e-6 * std::max(1.0, model.Hhat);
}

IndexCount morse_index(const ProductModel& model, double t, double tol) {
    if (!(tol > 0.0)) throw precondition_error("invalid_argument", "tolerance must be positive");
    const JacobiSlice slice = jacobi_slice(model, t, tol);
    IndexCount result;
    result.certificate = slice.certificate;
    for (const auto& e : slice.entries) {
        if (std::abs(e.rho - model.Hhat) <= tol) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "degenerate at t = " << t << ": branch (" << e.i << ", " << e.j << ") has rho = " << e.rho
                << " within " << tol << " of Hhat = " << model.Hhat;
            throw numerical_error("degenerate_at_t", msg.str());
        }
        if (e.rho < model.Hhat) result.count += e.multiplicity;
    }
    return result;
}

IndexCount morse_index(const ProductModel& model, double t) {
    return morse_index(model, t, default_degeneracy_tolerance(model));
}

IndexCount nullity(const ProductModel& model, double t, double tol) {
    if (!(tol > 0.0)) throw precondition_error("invalid_argument", "tolerance must be positive");
    const JacobiSlice slice = jacobi_slice(model, t, tol);
    IndexCount result;
    result.certificate = slice.certificate;
    for (const auto& e : slice.entries) {
        if (std::abs(e.rho - model.Hhat) <= tol) result.count += e.multiplicity;
    }
    return result;
}

namespace {

void require_yamabe_dimension(int m) {
    if (m < 3) throw precondition_error("invalid_argument", "Yamabe dimension m must be at least 3");
}

void require_full_vector(const AssembledForms& forms, const Eigen::VectorXd& phi) {
    if (phi.size() != forms.num_dofs()) {
        throw precondition_error("invalid_argument", "phi must have one value per mesh vertex");
    }
}

// Nodal power |φ|^p.
Eigen::VectorXd nodal_power(const Eigen::VectorXd& phi, double p) {
    return phi.unaryExpr([p](double x) { return std::pow(std::abs(x), p); });
}

}  // namespace

double conformal_mean_curvature_from_integrals(double grad_energy, double boundary_l2, double H_g, int m) {
    require_yamabe_dimension(m);
    return 2.0 / (m - 2) * grad_energy + H_g * boundary_l2;
}

double conformal_mean_curvature(const AssembledForms& forms, const Eigen::VectorXd& phi, double H_g, int m,
                                double tol) {
    require_yamabe_dimension(m);
    require_full_vector(forms, phi);
    const SparseMatrix K = forms.K.to_sparse();
    const SparseMatrix B = forms.B.to_sparse();
    const Eigen::VectorXd Kphi = K * phi;

    double interior_residual = 0.0;
    for (Index v : forms.interior_dofs) interior_residual = std::max(interior_residual, std::abs(Kphi(v)));
    const double k_scale = std::max(1.0, forms.K.one_norm() * phi.cwiseAbs().maxCoeff());
    if (interior_residual > tol * k_scale) {
        throw precondition_error("not_harmonic", "phi is not discretely harmonic (interior residual " +
                                                     std::to_string(interior_residual) + ")");
    }

    const double p = 2.0 * (m - 1) / (m - 2);
    const Eigen::VectorXd lumped = B * Eigen::VectorXd::Ones(phi.size());
    const double normalization = lumped.dot(nodal_power(phi, p));
    if (std::abs(normalization - 1.0) > tol) {
        throw precondition_error("normalization_violated",
                                 "boundary normalization integral is " + std::to_string(normalization) + ", not 1");
    }
    return conformal_mean_curvature_from_integrals(phi.dot(Kphi), phi.dot(B * phi), H_g, m);
}

double yamabe_residual(const AssembledForms& forms, const Eigen::VectorXd& phi, double H_candidate, double H_g,
                       int m) {
    require_yamabe_dimension(m);
    require_full_vector(forms, phi);
    const SparseMatrix B = forms.B.to_sparse();
    const double half = 0.5 * (m - 2);
    const Eigen::VectorXd r = forms.K.to_sparse() * phi + half * H_g * (B * phi) -
                              half * H_candidate * (B * nodal_power(phi, static_cast<double>(m) / (m - 2)));
    return r.norm();
}

Eigen::VectorXd normalized_constant(const AssembledForms& forms, int m) {
    require_yamabe_dimension(m);
    const double p = 2.0 * (m - 1) / (m - 2);
    const double area = forms.B.total();
    if (!(area > 0.0)) throw precondition_error("invalid_argument", "boundary measure must be positive");
    return Eigen::VectorXd::Constant(forms.num_dofs(), std::pow(area, -1.0 / p));
}

NormalizedForms normalize_boundary_measure(const AssembledForms& forms) {
    if (forms.dim < 2) {
        throw precondition_error("invalid_argument", "counting boundary measure of a 1-D mesh is scale invariant");
    }
    const double area = forms.B.total();
    const double t = std::pow(area, -2.0 / (forms.dim - 1));
    return {scale_metric_forms(forms, t, forms.dim), t};
}

}  // namespace steklov
