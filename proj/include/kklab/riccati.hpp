#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace kklab {

/// Scalar function of time: a constant, an arbitrary callable, or samples
/// joined by linear interpolation (held constant outside the sample range).
class TimeFunction {
public:
    TimeFunction() : TimeFunction(constant(0.0)) {}

    static TimeFunction constant(double value);
    static TimeFunction callable(std::function<double(double)> f);
    static TimeFunction sampled(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    std::optional<double> constant_value() const;

    /// Integral from 0 to t. Exact for constant and sampled functions,
    /// adaptive quadrature for callables.
    double integral(double t) const;

private:
    struct Samples {
        std::vector<double> times;
        std::vector<double> values;
    };
    using Repr = std::variant<double, std::function<double(double)>, Samples>;

    explicit TimeFunction(Repr repr) : repr_(std::move(repr)) {}

    Repr repr_;
};

struct RiccatiModel {
    TimeFunction alpha;
    double beta = 0.0;
    double k0 = 1.0;

    /// Throws InvalidInput when beta < 0 or k0 is not finite.
    void validate() const;
};

/// dk/dt = alpha k - (4/5) beta k^2
constexpr double riccati_rhs(double k, double alpha_val, double beta) noexcept {
    return alpha_val * k - 0.8 * beta * k * k;
}

/// Classical fixed-step RK4 for dy/dt = f(t, y). `t_grid` must be ascending;
/// each interval is split into equal substeps no longer than
/// (t_grid.back() - t_grid.front()) / steps. Returns y at every grid time.
/// Throws Blowup when y leaves the finite range.
std::vector<double> integrate_rk4(const std::function<double(double, double)>& f, double y0,
                                  std::span<const double> t_grid, std::size_t steps);

/// RK4 solution of the Riccati model on `t_grid` (which must start at 0).
std::vector<double> solve_riccati_numeric(const RiccatiModel& model, std::span<const double> t_grid,
                                          std::size_t steps = 10000);

/// F(t) = int_0^t exp(G(s)) ds with G(s) = int_0^s alpha.
double growth_integral(const TimeFunction& alpha, double t);

/// k0 e^{G(t)} / (1 + (4/5) beta k0 F(t)). Throws FiniteTimeSingularity when
/// the denominator is not positive.
double riccati_closed_form(const RiccatiModel& model, double t);

struct PerturbativeResult {
    double value = 0.0;
    double expansion_parameter = 0.0;  // (4/5) beta |k0| F(t)
    bool valid = true;                 // expansion_parameter < validity_limit

    static constexpr double validity_limit = 0.5;
};

/// First-order-in-beta expansion k0 e^{G(t)} [1 - (4/5) beta k0 F(t)].
PerturbativeResult riccati_perturbative(const RiccatiModel& model, double t);

}  // namespace kklab
