#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kklab {

/// Scaling that carries dk/dt = n + m t + lambda k^2 (and its t-derivative)
/// onto Painleve II, q'' = z q + 2 q^3 + delta.
///
/// With tau = n + m t:   k = k_scale * q,   tau = z_scale * z,
///   k_scale = (2m / lambda^2)^{1/3},  z_scale = (m^2 / (2 lambda))^{1/3}.
///
/// Differentiating the first-order equation gives
///   k_tt = c + 2 lambda tau k + 2 lambda^2 k^3,
/// which maps to PII with delta = c / (2m). Solutions of the first-order
/// equation have c = m, i.e. delta = 1/2.
struct PainleveProblem {
    double n = 0.0;
    double m = 1.0;
    double lambda = 1.0;
    double delta = 0.5;
    double k_scale = 0.0;
    double z_scale = 0.0;

    double z_of_t(double t) const noexcept { return (n + m * t) / z_scale; }
    double t_of_z(double z) const noexcept { return (z_scale * z - n) / m; }
    double q_of_k(double k) const noexcept { return k / k_scale; }
    double k_of_q(double q) const noexcept { return k_scale * q; }
    /// dq/dz from dk/dt.
    double dq_dz(double dk_dt) const noexcept { return dk_dt * z_scale / (k_scale * m); }
    /// dk/dt from dq/dz.
    double dk_dt(double dq_dz) const noexcept { return dq_dz * k_scale * m / z_scale; }
    /// Constant term c of the second-order equation for this delta.
    double second_order_constant() const noexcept { return 2.0 * m * delta; }
};

/// Reduction of the first-order equation (delta = 1/2).
PainleveProblem reduce_to_pii(double n, double m, double lambda);

/// Reduction of the second-order family k_tt = 2 m delta + 2 lambda tau k + 2 lambda^2 k^3.
PainleveProblem reduce_to_pii(double n, double m, double lambda, double delta);

struct PiiSolution {
    double delta = 0.0;
    std::vector<double> z;
    std::vector<double> q;
    std::vector<double> q_prime;
    std::vector<double> residual;  // |q'' - (z q + 2 q^3 + delta)|
    double max_residual = 0.0;
    bool pole_encountered = false;
    double pole_location = 0.0;

    static constexpr double residual_tolerance = 1e-8;
    bool accepted() const noexcept { return !pole_encountered && max_residual < residual_tolerance; }
};

/// |q| beyond which integration stops at a movable pole.
inline constexpr double pii_pole_threshold = 1e8;

/// Fixed-step RK4 from z_start to z_end (either direction). Stops at the
/// first movable pole and reports its estimated location.
PiiSolution solve_pii(double delta, double q0, double q0_prime, double z_start, double z_end,
                      std::size_t steps);

/// Pointwise |q'' - (z q + 2 q^3 + delta)| on a uniform z grid, with q''
/// from fourth-order finite differences of q'. Needs at least 5 points.
std::vector<double> pii_residual(double delta, std::span<const double> z, std::span<const double> q,
                                 std::span<const double> q_prime);

/// Exact rational solution for integer delta in [-2, 2], from the
/// Yablonskii-Vorob'ev polynomials Q0 = 1, Q1 = z, Q2 = z^3 + 4:
///   q_n = d/dz log(Q_{n-1} / Q_n),   q_{-n} = -q_n.
double pii_exact_rational(int delta, double z);

}  // namespace kklab
