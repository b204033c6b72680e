#include "steklov/factors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "steklov/errors.hpp"

namespace steklov {

namespace {

// Eigenvalues closer than this (relative) are treated as one eigenvalue.
constexpr double kGroupingTolerance = 1e-9;

}  // namespace

ClosedFactorSpectrum flat_torus_spectrum(const Eigen::MatrixXd& lattice_basis, double cutoff) {
    const Eigen::Index m = lattice_basis.rows();
    if (m < 1 || lattice_basis.cols() != m) {
        throw precondition_error("invalid_argument", "lattice basis must be a square matrix");
    }
    if (!(cutoff >= 0.0)) throw precondition_error("invalid_argument", "cutoff must be non-negative");
    const double volume_scale = lattice_basis.colwise().norm().prod();
    if (std::abs(lattice_basis.determinant()) <= 1e-12 * volume_scale) {
        throw precondition_error("singular_basis", "lattice basis is singular");
    }

    const Eigen::MatrixXd dual = lattice_basis.inverse().transpose();
    const double radius = std::sqrt(cutoff) / (2.0 * M_PI);
    std::vector<long> bound(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        bound[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(lattice_basis.col(i).norm() * radius + 1e-9));
    }

    const double limit = cutoff * (1.0 + kGroupingTolerance);
    std::vector<double> values;
    std::vector<long> k(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) k[static_cast<std::size_t>(i)] = -bound[static_cast<std::size_t>(i)];
    Eigen::VectorXd kv(m);
    while (true) {
        for (Eigen::Index i = 0; i < m; ++i) kv(i) = static_cast<double>(k[static_cast<std::size_t>(i)]);
        const double value = 4.0 * M_PI * M_PI * (dual * kv).squaredNorm();
        if (value <= limit) values.push_back(value);
        Eigen::Index pos = 0;
        while (pos < m && k[static_cast<std::size_t>(pos)] == bound[static_cast<std::size_t>(pos)]) {
            k[static_cast<std::size_t>(pos)] = -bound[static_cast<std::size_t>(pos)];
            ++pos;
        }
        if (pos == m) break;
        ++k[static_cast<std::size_t>(pos)];
    }
    std::sort(values.begin(), values.end());

    ClosedFactorSpectrum spectrum;
    spectrum.dim = static_cast<int>(m);
    spectrum.cutoff = cutoff;
    std::size_t start = 0;
    while (start < values.size()) {
        std::size_t end = start + 1;
        while (end < values.size() &&
               values[end] - values[start] <= kGroupingTolerance * std::max(1.0, values[start])) {
            ++end;
        }
        double mean = 0.0;
        for (std::size_t n = start; n < end; ++n) mean += values[n];
        mean /= static_cast<double>(end - start);
        spectrum.entries.push_back({start == 0 ? 0.0 : mean, static_cast<int>(end - start)});
        start = end;
    }
    return spectrum;
}

ClosedFactorSpectrum from_list(const std::vector<std::pair<double, int>>& entries, int dim) {
    if (dim < 1) throw precondition_error("invalid_spectrum", "closed factor dimension must be positive");
    if (entries.empty()) throw precondition_error("invalid_spectrum", "spectrum must contain the zero eigenvalue");
    if (entries.front().first != 0.0) {
        throw precondition_error("invalid_spectrum", "first eigenvalue of a closed manifold must be 0");
    }
    if (entries.front().second != 1) {
        throw precondition_error("invalid_spectrum", "connected manifold requires μ⁽⁰⁾ = 1");
    }
    ClosedFactorSpectrum spectrum;
    spectrum.dim = dim;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [value, mult] = entries[i];
        if (mult < 1) {
            throw precondition_error("invalid_spectrum", "multiplicity of entry " + std::to_string(i) + " must be >= 1");
        }
        if (i > 0 && !(value > entries[i - 1].first)) {
            throw precondition_error("invalid_spectrum", "eigenvalues must be distinct and strictly ascending (entry " +
                                                             std::to_string(i) + ")");
        }
        spectrum.entries.push_back({value, mult});
    }
    spectrum.cutoff = entries.back().first;
    return spectrum;
}

ClosedFactorSpectrum parse_factor_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        const auto raw = doc.at("entries").get<std::vector<std::pair<double, int>>>();
        ClosedFactorSpectrum spectrum = from_list(raw, doc.at("dim").get<int>());
        if (doc.contains("cutoff")) {
            const double cutoff = doc.at("cutoff").get<double>();
            if (cutoff < spectrum.cutoff) {
                throw precondition_error("invalid_spectrum", "cutoff lies below the last listed eigenvalue");
            }
            spectrum.cutoff = cutoff;
        }
        return spectrum;
    } catch (const nlohmann::json::exception& e) {
        throw precondition_error("parse_error", std::string("factor spectrum JSON: ") + e.what());
    }
}

std::string factor_to_json(const ClosedFactorSpectrum& spectrum) {
    nlohmann::json doc;
    doc["dim"] = spectrum.dim;
    auto entries = nlohmann::json::array();
    for (const auto& e : spectrum.entries) entries.push_back({e.value, e.multiplicity});
    doc["entries"] = std::move(entries);
    doc["cutoff"] = spectrum.cutoff;
    return doc.dump();
}

}  // namespace steklov
