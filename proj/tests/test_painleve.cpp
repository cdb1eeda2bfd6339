#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <vector>

#include "kklab/errors.hpp"
#include "kklab/painleve.hpp"
#include "kklab/riccati.hpp"

using namespace kklab;

namespace {

// delta = 1/2 one-parameter family: q = -phi'/phi, phi(z) = Ai(-c z), c = 2^{-1/3}.
struct AiryOracle {
    double c = 1.0 / 1.25992104989487316476721060728;

    double q(double z) const {
        return c * boost::math::airy_ai_prime(-c * z) / boost::math::airy_ai(-c * z);
    }
    // q' = q^2 + z / 2
    double q_prime(double z) const {
        const double v = q(z);
        return v * v + 0.5 * z;
    }
};

double rational_derivative(int delta, double z) {
    const double h = 1e-4;
    return (pii_exact_rational(delta, z - 2 * h) - 8 * pii_exact_rational(delta, z - h) +
            8 * pii_exact_rational(delta, z + h) - pii_exact_rational(delta, z + 2 * h)) /
           (12 * h);
}

}  // namespace

TEST_CASE("reduce_to_pii scaling") {
    const auto p = reduce_to_pii(0.0, 1.0, 1.0);
    CHECK(p.delta == 0.5);
    CHECK(p.k_scale == doctest::Approx(1.25992104989487316476721060728).epsilon(1e-15));
    CHECK(p.z_scale == doctest::Approx(1.0 / 1.25992104989487316476721060728).epsilon(1e-15));

    SUBCASE("maps round-trip") {
        const auto r = reduce_to_pii(0.3, -0.7, 1.9, -1.0);
        for (int i = 0; i < 100; ++i) {
            const double z = -5.0 + 0.1 * i;
            CHECK(std::abs(r.z_of_t(r.t_of_z(z)) - z) < 1e-12);
            CHECK(std::abs(r.q_of_k(r.k_of_q(z)) - z) < 1e-12);
            CHECK(std::abs(r.dq_dz(r.dk_dt(z)) - z) < 1e-12);
        }
    }
    SUBCASE("second-order equation maps onto PII with the chosen delta") {
        // q = -1/z solves PII with delta = 1; push it through the scaling and
        // substitute into k_tt = 2 m delta + 2 lambda tau k + 2 lambda^2 k^3.
        const auto r = reduce_to_pii(0.4, 0.6, -1.3, 1.0);
        auto k = [&](double t) { return r.k_of_q(-1.0 / r.z_of_t(t)); };
        for (double t : {0.5, 1.0, 2.0, 3.5}) {
            const double h = 1e-3;
            const double ktt = (-k(t + 2 * h) + 16 * k(t + h) - 30 * k(t) + 16 * k(t - h) - k(t - 2 * h)) / (12 * h * h);
            const double tau = r.n + r.m * t;
            const double rhs = r.second_order_constant() + 2 * r.lambda * tau * k(t) +
                               2 * r.lambda * r.lambda * std::pow(k(t), 3);
            CHECK(ktt == doctest::Approx(rhs).epsilon(1e-7));
        }
    }
    SUBCASE("singular scalings") {
        CHECK_THROWS_AS(reduce_to_pii(0.0, 0.0, 1.0), SingularScaling);
        CHECK_THROWS_AS(reduce_to_pii(0.0, 1.0, 0.0), SingularScaling);
        CHECK_THROWS_AS(reduce_to_pii(NAN, 1.0, 1.0), InvalidInput);
    }
}

TEST_CASE("first-order trajectories map onto delta = 1/2") {
    // dk/dt = n + m t + lambda k^2 integrated directly, then checked against PII.
    const double n = 0.2, m = 0.5, lambda = -0.4, k0 = 1.0;
    const auto r = reduce_to_pii(n, m, lambda);
    std::vector<double> t;
    for (int i = 0; i <= 400; ++i) t.push_back(2.0 * i / 400.0);
    const auto k = integrate_rk4([&](double s, double y) { return n + m * s + lambda * y * y; }, k0, t, 40000);

    std::vector<double> z, q, qp;
    for (std::size_t i = 0; i < t.size(); ++i) {
        z.push_back(r.z_of_t(t[i]));
        q.push_back(r.q_of_k(k[i]));
        qp.push_back(r.dq_dz(n + m * t[i] + lambda * k[i] * k[i]));
    }
    for (double v : pii_residual(r.delta, z, q, qp)) CHECK(v < 1e-6);

    const auto sol = solve_pii(r.delta, q.front(), qp.front(), z.front(), z.back(), 4000);
    CHECK_FALSE(sol.pole_encountered);
    CHECK(std::abs(sol.q.back() - q.back()) < 1e-8 * std::max(1.0, std::abs(q.back())));
}

TEST_CASE("solve_pii") {
    SUBCASE("zero solution") {
        const auto s = solve_pii(0.0, 0.0, 0.0, -3.0, 3.0, 600);
        for (double v : s.q) CHECK(v == 0.0);
        CHECK(s.accepted());
    }
    SUBCASE("tracks the rational solution -1/z") {
        const auto s = solve_pii(1.0, -1.0, 1.0, 1.0, 5.0, 10000);
        for (std::size_t i = 0; i < s.z.size(); ++i) CHECK(std::abs(s.q[i] + 1.0 / s.z[i]) < 1e-7);
        CHECK(s.accepted());
    }
    SUBCASE("tracks the Airy family at delta = 1/2") {
        const AiryOracle airy;
        const auto s = solve_pii(0.5, airy.q(-4.0), airy.q_prime(-4.0), -4.0, 1.0, 10000);
        CHECK_FALSE(s.pole_encountered);
        for (std::size_t i = 0; i < s.z.size(); i += 50)
            CHECK(std::abs(s.q[i] - airy.q(s.z[i])) < 1e-6 * std::abs(airy.q(s.z[i])));
        CHECK(s.max_residual < PiiSolution::residual_tolerance);
    }
    SUBCASE("symmetry q -> -q, delta -> -delta") {
        const auto a = solve_pii(0.7, 0.3, -0.2, 0.0, 2.0, 2000);
        const auto b = solve_pii(-0.7, -0.3, 0.2, 0.0, 2.0, 2000);
        for (std::size_t i = 0; i < a.q.size(); ++i) CHECK(std::abs(a.q[i] + b.q[i]) < 1e-9);
    }
    SUBCASE("fourth-order convergence") {
        const double exact = -1.0 / 3.0;
        const double e1 = std::abs(solve_pii(1.0, -1.0, 1.0, 1.0, 3.0, 50).q.back() - exact);
        const double e2 = std::abs(solve_pii(1.0, -1.0, 1.0, 1.0, 3.0, 100).q.back() - exact);
        CHECK(e1 / e2 > 8.0);
    }
    SUBCASE("integrates backwards") {
        const auto s = solve_pii(1.0, -0.2, 0.04, 5.0, 1.0, 8000);
        CHECK(s.z.back() == doctest::Approx(1.0));
        CHECK(s.q.back() == doctest::Approx(-1.0).epsilon(1e-8));
    }
    SUBCASE("detects a movable pole") {
        // -1/z approached from the left has a pole at 0.
        const auto s = solve_pii(1.0, 1.0, 1.0, -1.0, 1.0, 20000);
        CHECK(s.pole_encountered);
        CHECK(std::abs(s.pole_location) < 1e-3);
        CHECK_FALSE(s.accepted());
        CHECK(s.z.back() < 1e-3);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(solve_pii(0.0, 0.0, 0.0, 0.0, 1.0, 3), InvalidInput);
        CHECK_THROWS_AS(solve_pii(0.0, 0.0, 0.0, 1.0, 1.0, 100), InvalidInput);
        CHECK_THROWS_AS(solve_pii(0.0, NAN, 0.0, 0.0, 1.0, 100), InvalidInput);
    }
}

TEST_CASE("pii_exact_rational") {
    CHECK(pii_exact_rational(0, 1.7) == 0.0);
    CHECK(pii_exact_rational(1, 2.0) == doctest::Approx(-0.5));
    CHECK(pii_exact_rational(-1, 2.0) == doctest::Approx(0.5));
    CHECK(pii_exact_rational(2, 1.0) == doctest::Approx(1.0 - 3.0 / 5.0));

    SUBCASE("satisfies PII by substitution") {
        for (int delta = -2; delta <= 2; ++delta) {
            for (double z : {-3.1, -0.9, 0.6, 1.2, 2.5}) {
                const double h = 1e-3;
                const double q = pii_exact_rational(delta, z);
                const double qzz = (-pii_exact_rational(delta, z + 2 * h) + 16 * pii_exact_rational(delta, z + h) -
                                    30 * q + 16 * pii_exact_rational(delta, z - h) -
                                    pii_exact_rational(delta, z - 2 * h)) /
                                   (12 * h * h);
                CHECK(qzz == doctest::Approx(z * q + 2 * q * q * q + delta).epsilon(1e-6));
            }
        }
    }
    SUBCASE("numerical solution follows q_2") {
        const double z0 = 0.5, z1 = 3.0;
        const auto s = solve_pii(2.0, pii_exact_rational(2, z0), rational_derivative(2, z0), z0, z1, 20000);
        CHECK(s.q.back() == doctest::Approx(pii_exact_rational(2, z1)).epsilon(1e-7));
    }
    SUBCASE("poles and range") {
        CHECK_THROWS_AS(pii_exact_rational(1, 0.0), PoleError);
        CHECK_THROWS_AS(pii_exact_rational(-2, -std::cbrt(4.0)), PoleError);
        CHECK_THROWS_AS(pii_exact_rational(3, 1.0), InvalidInput);
    }
}

TEST_CASE("pii_residual") {
    std::vector<double> z, q, qp;
    for (int i = 0; i <= 800; ++i) {
        z.push_back(1.0 + 0.005 * i);
        q.push_back(-1.0 / z.back());
        qp.push_back(1.0 / (z.back() * z.back()));
    }
    for (double v : pii_residual(1.0, z, q, qp)) CHECK(v < 1e-6);
    const auto wrong = pii_residual(0.0, z, q, qp);
    CHECK(wrong[400] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(pii_residual(0.0, std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3},
                                 std::vector<double>{1, 2, 3}),
                    InvalidInput);
}
