#include "kklab/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kklab/errors.hpp"

namespace kklab {

PainleveProblem reduce_to_pii(double n, double m, double lambda) { return reduce_to_pii(n, m, lambda, 0.5); }

PainleveProblem reduce_to_pii(double n, double m, double lambda, double delta) {
    if (!std::isfinite(n) || !std::isfinite(m) || !std::isfinite(lambda) || !std::isfinite(delta))
        throw InvalidInput("reduction parameters must be finite");
    if (m == 0.0) throw SingularScaling("m = dg/dt(t0) must be nonzero for the Painleve scaling");
    if (lambda == 0.0) throw SingularScaling("lambda must be nonzero for the Painleve scaling");
    PainleveProblem p;
    p.n = n;
    p.m = m;
    p.lambda = lambda;
    p.delta = delta;
    p.k_scale = std::cbrt(2.0 * m / (lambda * lambda));
    p.z_scale = std::cbrt(m * m / (2.0 * lambda));
    return p;
}

std::vector<double> pii_residual(double delta, std::span<const double> z, std::span<const double> q,
                                 std::span<const double> q_prime) {
    const std::size_t n = z.size();
    if (q.size() != n || q_prime.size() != n) throw InvalidInput("z, q, q' must have equal length");
    if (n < 5) throw InvalidInput("residual needs at least 5 grid points");
    const double h = (z[n - 1] - z[0]) / static_cast<double>(n - 1);
    const auto& p = q_prime;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2;
        if (i >= 2 && i + 2 < n) {
            d2 = (-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * h);
        } else if (i == 0) {
            d2 = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * h);
        } else if (i == 1) {
            d2 = (-3.0 * p[0] - 10.0 * p[1] + 18.0 * p[2] - 6.0 * p[3] + p[4]) / (12.0 * h);
        } else if (i == n - 2) {
            d2 = (3.0 * p[n - 1] + 10.0 * p[n - 2] - 18.0 * p[n - 3] + 6.0 * p[n - 4] - p[n - 5]) / (12.0 * h);
        } else {
            d2 = (25.0 * p[n - 1] - 48.0 * p[n - 2] + 36.0 * p[n - 3] - 16.0 * p[n - 4] + 3.0 * p[n - 5]) /
                 (12.0 * h);
        }
        out[i] = std::abs(d2 - (z[i] * q[i] + 2.0 * q[i] * q[i] * q[i] + delta));
    }
    return out;
}

PiiSolution solve_pii(double delta, double q0, double q0_prime, double z_start, double z_end,
                      std::size_t steps) {
    if (!std::isfinite(delta) || !std::isfinite(q0) || !std::isfinite(q0_prime) ||
        !std::isfinite(z_start) || !std::isfinite(z_end))
        throw InvalidInput("Painleve II initial data must be finite");
    if (steps < 4) throw InvalidInput("solve_pii needs at least 4 steps");
    if (z_start == z_end) throw InvalidInput("z span is empty");

    const double h = (z_end - z_start) / static_cast<double>(steps);
    auto accel = [delta](double z, double q) { return z * q + 2.0 * q * q * q + delta; };

    PiiSolution sol;
    sol.delta = delta;
    sol.z.reserve(steps + 1);
    sol.q.reserve(steps + 1);
    sol.q_prime.reserve(steps + 1);
    double q = q0, p = q0_prime;
    sol.z.push_back(z_start);
    sol.q.push_back(q);
    sol.q_prime.push_back(p);

    for (std::size_t i = 0; i < steps; ++i) {
        const double z = z_start + static_cast<double>(i) * h;
        const double k1q = p, k1p = accel(z, q);
        const double k2q = p + 0.5 * h * k1p, k2p = accel(z + 0.5 * h, q + 0.5 * h * k1q);
        const double k3q = p + 0.5 * h * k2p, k3p = accel(z + 0.5 * h, q + 0.5 * h * k2q);
        const double k4q = p + h * k3p, k4p = accel(z + h, q + h * k3q);
        const double qn = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        const double pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        const double zn = z_start + static_cast<double>(i + 1) * h;
        if (!std::isfinite(qn) || std::abs(qn) > pii_pole_threshold) {
            sol.pole_encountered = true;
            // Near a pole q ~ +-1 / (z - z_p).
            const double dist = std::isfinite(qn) ? 1.0 / std::abs(qn) : 0.0;
            sol.pole_location = (std::isfinite(qn) ? zn : z) + (h > 0.0 ? dist : -dist);
            break;
        }
        q = qn;
        p = pn;
        sol.z.push_back(zn);
        sol.q.push_back(q);
        sol.q_prime.push_back(p);
    }

    if (sol.z.size() >= 5) {
        sol.residual = pii_residual(delta, sol.z, sol.q, sol.q_prime);
        sol.max_residual = *std::max_element(sol.residual.begin(), sol.residual.end());
    } else {
        sol.residual.assign(sol.z.size(), 0.0);
    }
    return sol;
}

double pii_exact_rational(int delta, double z) {
    if (delta < -2 || delta > 2)
        throw InvalidInput("rational solutions are provided for delta in [-2, 2], got " + std::to_string(delta));
    if (!std::isfinite(z)) throw InvalidInput("z must be finite");
    constexpr double pole_eps = 1e-12;
    const int sign = delta < 0 ? -1 : 1;
    switch (std::abs(delta)) {
        case 0:
            return 0.0;
        case 1:
            if (std::abs(z) < pole_eps) throw PoleError("z = 0 is a pole of the delta = +-1 rational solution");
            return -sign / z;
        default: {
            const double q2 = z * z * z + 4.0;
            if (std::abs(z) < pole_eps || std::abs(q2) < pole_eps)
                throw PoleError("z is a pole of the delta = +-2 rational solution");
            // d/dz log(z / (z^3 + 4)) = 1/z - 3 z^2 / (z^3 + 4)
            return sign * (1.0 / z - 3.0 * z * z / q2);
        }
    }
}

}  // namespace kklab
