#include <doctest.h>

#include <cmath>
#include <vector>

#include "kklab/errors.hpp"
#include "kklab/riccati.hpp"

using namespace kklab;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

RiccatiModel constant_model(double a, double beta, double k0) {
    return RiccatiModel{TimeFunction::constant(a), beta, k0};
}

}  // namespace

TEST_CASE("riccati_rhs") {
    CHECK(riccati_rhs(0.0, 1.3, 0.4) == 0.0);
    CHECK(riccati_rhs(1.0, 1.0, 0.0) == 1.0);
    const double a = 0.7, b = 0.2;
    CHECK(std::abs(riccati_rhs(1.25 * a / b, a, b)) < 1e-15);
}

TEST_CASE("TimeFunction") {
    const auto c = TimeFunction::constant(2.0);
    CHECK(c(5.0) == 2.0);
    CHECK(c.integral(3.0) == 6.0);
    CHECK(c.constant_value().value() == 2.0);

    const auto s = TimeFunction::sampled({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
    CHECK(s(0.5) == doctest::Approx(1.0));
    CHECK(s(1.0) == 2.0);
    CHECK(s(3.0) == 0.0);
    CHECK(s.integral(2.0) == doctest::Approx(2.0));
    CHECK(s.integral(1.5) == doctest::Approx(1.0 + 0.5 * (2.0 + 1.0) * 0.5));
    CHECK_FALSE(s.constant_value().has_value());

    const auto f = TimeFunction::callable([](double t) { return std::cos(t); });
    CHECK(f.integral(1.2) == doctest::Approx(std::sin(1.2)).epsilon(1e-12));

    CHECK_THROWS_AS(TimeFunction::sampled({1.0, 0.0}, {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(TimeFunction::sampled({0.0}, {1.0, 2.0}), InvalidInput);
}

TEST_CASE("solve_riccati_numeric") {
    const auto grid = linspace(0.0, 2.0, 21);
    SUBCASE("trivial dynamics") {
        for (double k : solve_riccati_numeric(constant_model(0.0, 0.0, 1.7), grid)) CHECK(k == 1.7);
        for (double k : solve_riccati_numeric(constant_model(0.9, 0.3, 0.0), grid)) CHECK(k == 0.0);
    }
    SUBCASE("pure algebraic decay k0 / (1 + 0.8 beta k0 t)") {
        const auto ks = solve_riccati_numeric(constant_model(0.0, 0.5, 2.0), grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(ks[i] == doctest::Approx(2.0 / (1.0 + 0.8 * 0.5 * 2.0 * grid[i])).epsilon(1e-12));
    }
    SUBCASE("approaches the fixed point 5a/(4 beta)") {
        const std::vector<double> long_grid{0.0, 40.0};
        const auto ks = solve_riccati_numeric(constant_model(1.0, 0.25, 0.1), long_grid, 40000);
        CHECK(ks.back() == doctest::Approx(5.0 / (4.0 * 0.25)).epsilon(1e-10));
    }
    SUBCASE("positivity for k0 > 0") {
        auto alpha = TimeFunction::callable([](double t) { return 3.0 * std::sin(5.0 * t); });
        for (double k : solve_riccati_numeric(RiccatiModel{alpha, 0.7, 0.05}, linspace(0.0, 5.0, 201), 20000))
            CHECK(k > 0.0);
    }
    SUBCASE("fourth-order convergence") {
        const auto model = constant_model(1.0, 0.3, 1.0);
        const std::vector<double> g{0.0, 2.0};
        const double exact = riccati_closed_form(model, 2.0);
        const double e1 = std::abs(solve_riccati_numeric(model, g, 20).back() - exact);
        const double e2 = std::abs(solve_riccati_numeric(model, g, 40).back() - exact);
        CHECK(e1 / e2 > 14.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_riccati_numeric(constant_model(0.0, 0.0, 1.0), std::vector<double>{0.5, 1.0}),
                        InvalidInput);
        CHECK_THROWS_AS(solve_riccati_numeric(constant_model(0.0, -1.0, 1.0), grid), InvalidInput);
        // beta = 0 with k0 < 0 and a strongly negative quadratic: use generic RK4 on k' = k^2
        try {
            integrate_rk4([](double, double k) { return k * k; }, 1.0, std::vector<double>{0.0, 2.0}, 2000);
            FAIL("expected blow-up");
        } catch (const Blowup& e) {
            CHECK(e.time_estimate() == doctest::Approx(1.0).epsilon(0.01));
        }
    }
}

TEST_CASE("riccati_closed_form") {
    CHECK(riccati_closed_form(constant_model(0.4, 0.3, 1.5), 0.0) == 1.5);
    for (double t : {0.3, 1.0, 2.0})
        CHECK(riccati_closed_form(constant_model(0.0, 0.5, 2.0), t) ==
              doctest::Approx(2.0 / (1.0 + 0.8 * 0.5 * 2.0 * t)).epsilon(1e-13));
    // 30-digit reference: e / (1 + 0.08 (e - 1))
    CHECK(riccati_closed_form(constant_model(1.0, 0.1, 1.0), 1.0) ==
          doctest::Approx(2.38977699736738188516574412648).epsilon(1e-12));
    const double numeric = solve_riccati_numeric(constant_model(1.0, 0.1, 1.0), std::vector<double>{0.0, 1.0}).back();
    CHECK(std::abs(riccati_closed_form(constant_model(1.0, 0.1, 1.0), 1.0) - numeric) / numeric < 1e-8);

    SUBCASE("time-dependent and sampled alpha agree with RK4") {
        const auto grid = linspace(0.0, 2.0, 11);
        const RiccatiModel callable{TimeFunction::callable([](double t) { return 0.5 + std::cos(2 * t); }), 0.2, 1.2};
        const auto ks = solve_riccati_numeric(callable, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(riccati_closed_form(callable, grid[i]) - ks[i]) < 1e-9 * std::abs(ks[i]));

        const RiccatiModel sampled{TimeFunction::sampled({0.0, 0.5, 1.0, 2.0}, {1.0, -0.5, 0.3, 0.8}), 0.2, 1.0};
        const auto ks2 = solve_riccati_numeric(sampled, grid, 40000);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(riccati_closed_form(sampled, grid[i]) - ks2[i]) < 1e-8 * std::abs(ks2[i]));
    }
    SUBCASE("finite-time singularity for negative k0") {
        CHECK_THROWS_AS(riccati_closed_form(constant_model(0.0, 1.0, -1.0), 2.0), FiniteTimeSingularity);
    }
    SUBCASE("k0 = 0 is invariant") {
        CHECK(riccati_closed_form(constant_model(1.0, 0.5, 0.0), 1.0) == 0.0);
        CHECK(riccati_perturbative(constant_model(1.0, 0.5, 0.0), 1.0).value == 0.0);
    }
}

TEST_CASE("riccati_perturbative") {
    SUBCASE("exact at beta = 0") {
        const auto r = riccati_perturbative(constant_model(0.7, 0.0, 1.3), 1.5);
        CHECK(r.value == doctest::Approx(1.3 * std::exp(0.7 * 1.5)).epsilon(1e-15));
        CHECK(r.valid);
    }
    SUBCASE("direct expansion arithmetic") {
        const auto r = riccati_perturbative(constant_model(0.0, 0.01, 1.0), 1.0);
        CHECK(r.value == doctest::Approx(0.992).epsilon(1e-14));
        const double closed = riccati_closed_form(constant_model(0.0, 0.01, 1.0), 1.0);
        CHECK(closed == doctest::Approx(1.0 / 1.008).epsilon(1e-14));
        CHECK(std::abs(r.value - closed) == doctest::Approx(0.008 * 0.008 / 1.008).epsilon(1e-6));
    }
    SUBCASE("agrees with the closed form to O(beta^2)") {
        const auto model = constant_model(1.0, 1e-3, 1.0);
        for (double t : linspace(0.0, 1.0, 11)) {
            const double closed = riccati_closed_form(model, t);
            CHECK(std::abs(riccati_perturbative(model, t).value - closed) / closed < 1e-5);
        }
    }
    SUBCASE("discrepancy scales as beta^2") {
        auto err = [](double beta) {
            const auto model = constant_model(1.0, beta, 1.0);
            return std::abs(riccati_perturbative(model, 1.0).value - riccati_closed_form(model, 1.0));
        };
        // expansion parameter 0.8 beta (e - 1) <= 0.1 for beta <= 0.07
        CHECK(err(0.04) / err(0.02) == doctest::Approx(4.0).epsilon(0.1));
        CHECK(err(0.02) / err(0.005) == doctest::Approx(16.0).epsilon(0.1));
    }
    SUBCASE("validity flag") {
        const auto r = riccati_perturbative(constant_model(1.0, 0.5, 1.0), 1.0);
        CHECK(r.expansion_parameter == doctest::Approx(0.4 * (std::exp(1.0) - 1.0)));
        CHECK_FALSE(r.valid);
    }
}
