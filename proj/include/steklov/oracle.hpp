#pragma once

#include <vector>

namespace steklov::oracle {

/// Power-series coefficients a_n of I_k(s) = Σ a_n s^{2n+k}, n = 0..terms-1.
std::vector<double> bessel_i_coefficients(int k, int terms);

/// Modified Bessel function of the first kind I_k(s), 0 ≤ s ≤ 50, by its power
/// series (relative error ~1e-15 on the window).
double bessel_i(int k, double s);

/// s·I_k'(s)/I_k(s) with I_k' = (I_{k-1} + I_{k+1})/2; requires 0 < s ≤ 50.
double bessel_ratio(int k, double s);

/// First Robin–Steklov eigenvalue of angular mode k on the unit disk:
/// −Δu + cu = 0, ∂_r u = ρu, u = I_k(√c r)·e^{ikθ}. Returns k at c = 0.
/// Modes k ≥ 1 carry multiplicity 2, k = 0 multiplicity 1.
double disk_robin_steklov(int k, double c);

enum class Parity { Even, Odd };

/// Robin–Steklov eigenvalue of [0, L] for the even (cosh) or odd (sinh) mode
/// about the midpoint. c = 0 gives the limits 0 (even) and 2/L (odd).
double interval_robin_steklov(Parity parity, double c, double length);

/// One closed-form branch c ↦ ρ(c), strictly increasing in c.
struct OracleBranch {
    enum class Geometry { UnitDisk, Interval };
    Geometry geometry = Geometry::UnitDisk;
    int mode = 0;  ///< angular index k for the disk
    Parity parity = Parity::Even;
    double length = 1.0;

    static OracleBranch disk(int k);
    static OracleBranch interval(Parity parity, double length);

    double operator()(double c) const;
    /// Largest c the evaluator accepts (the disk series window s ≤ 50).
    double max_c() const;
};

/// c* with ρ(c*) = target, by bisection to |ρ(c*) − target| ≤ 1e-10·target.
/// Throws std::domain_error when target ≤ ρ(0) or target is beyond the
/// evaluation window.
double solve_branch_root(const OracleBranch& branch, double target);

}  // namespace steklov::oracle
