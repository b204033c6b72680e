#include "steklov/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace steklov::oracle {

namespace {

constexpr double kMaxArgument = 50.0;

void check_window(double s) {
    if (!(s >= 0.0) || s > kMaxArgument) {
        throw std::domain_error("Bessel argument " + std::to_string(s) + " outside [0, 50]");
    }
}

}  // namespace

std::vector<double> bessel_i_coefficients(int k, int terms) {
    if (k < 0) throw std::domain_error("Bessel order must be non-negative");
    std::vector<double> a;
    a.reserve(static_cast<std::size_t>(terms));
    // a_0 = 1 / (2^k k!),  a_{n+1} = a_n / (4 (n+1)(n+k+1))
    double coeff = 1.0;
    for (int j = 1; j <= k; ++j) coeff /= 2.0 * j;
    for (int n = 0; n < terms; ++n) {
        a.push_back(coeff);
        coeff /= 4.0 * (n + 1) * (n + k + 1);
    }
    return a;
}

double bessel_i(int k, double s) {
    if (k < 0) k = -k;  // I_{-k} = I_k for integer order
    check_window(s);
    const double half = 0.5 * s;
    double term = 1.0;
    for (int j = 1; j <= k; ++j) term *= half / j;
    if (term == 0.0) return 0.0;
    const double q = half * half;
    double sum = term;
    for (int n = 0; n < 1000; ++n) {
        term *= q / ((n + 1.0) * (n + k + 1.0));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double bessel_ratio(int k, double s) {
    if (k < 0) throw std::domain_error("Bessel order must be non-negative");
    if (!(s > 0.0)) throw std::domain_error("bessel_ratio needs s > 0");
    check_window(s);
    const double derivative = 0.5 * (bessel_i(k - 1, s) + bessel_i(k + 1, s));
    return s * derivative / bessel_i(k, s);
}

double disk_robin_steklov(int k, double c) {
    if (k < 0) throw std::domain_error("angular index must be non-negative");
    if (!(c >= 0.0)) throw std::domain_error("bulk coefficient must be non-negative");
    if (c == 0.0) return static_cast<double>(k);
    return bessel_ratio(k, std::sqrt(c));
}

double interval_robin_steklov(Parity parity, double c, double length) {
    if (!(length > 0.0)) throw std::domain_error("interval length must be positive");
    if (!(c >= 0.0)) throw std::domain_error("bulk coefficient must be non-negative");
    if (c == 0.0) return parity == Parity::Even ? 0.0 : 2.0 / length;
    const double s = std::sqrt(c);
    const double th = std::tanh(0.5 * s * length);
    return parity == Parity::Even ? s * th : s / th;
}

OracleBranch OracleBranch::disk(int k) {
    OracleBranch b;
    b.geometry = Geometry::UnitDisk;
    b.mode = k;
    return b;
}

OracleBranch OracleBranch::interval(Parity parity, double length) {
    OracleBranch b;
    b.geometry = Geometry::Interval;
    b.parity = parity;
    b.length = length;
    return b;
}

double OracleBranch::operator()(double c) const {
    return geometry == Geometry::UnitDisk ? disk_robin_steklov(mode, c) : interval_robin_steklov(parity, c, length);
}

double OracleBranch::max_c() const {
    return geometry == Geometry::UnitDisk ? kMaxArgument * kMaxArgument : 1e12;
}

double solve_branch_root(const OracleBranch& branch, double target) {
    const double base = branch(0.0);
    if (!(target > base)) {
        throw std::domain_error("target " + std::to_string(target) + " is not above the branch value " +
                                std::to_string(base) + " at c = 0");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (branch(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > branch.max_c()) {
            hi = branch.max_c();
            if (branch(hi) < target) throw std::domain_error("target beyond the oracle evaluation window");
            break;
        }
    }
    for (int iteration = 0; iteration < 400; ++iteration) {
        const double mid = 0.5 * (lo + hi);
        const double value = branch(mid);
        if (std::abs(value - target) <= 1e-10 * target) return mid;
        if (value < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace steklov::oracle
