#include "kklab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kklab/errors.hpp"
#include "kklab/quadrature.hpp"

namespace kklab {

namespace {
constexpr double quadrature_tol = 1e-12;
constexpr double blowup_threshold = 1e150;
}  // namespace

TimeFunction TimeFunction::constant(double value) {
    if (!std::isfinite(value)) throw InvalidInput("constant alpha must be finite");
    return TimeFunction(Repr{value});
}

TimeFunction TimeFunction::callable(std::function<double(double)> f) {
    if (!f) throw InvalidInput("alpha callable is empty");
    return TimeFunction(Repr{std::move(f)});
}

TimeFunction TimeFunction::sampled(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size())
        throw InvalidInput("sampled alpha needs equally many (non-zero) times and values");
    if (!std::is_sorted(times.begin(), times.end()) ||
        std::adjacent_find(times.begin(), times.end()) != times.end())
        throw InvalidInput("sampled alpha times must be strictly ascending");
    return TimeFunction(Repr{Samples{std::move(times), std::move(values)}});
}

double TimeFunction::operator()(double t) const {
    return std::visit(
        [t](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, double>) {
                return r;
            } else if constexpr (std::is_same_v<T, Samples>) {
                const auto& ts = r.times;
                if (t <= ts.front()) return r.values.front();
                if (t >= ts.back()) return r.values.back();
                const auto it = std::upper_bound(ts.begin(), ts.end(), t);
                const auto i = static_cast<std::size_t>(it - ts.begin()) - 1;
                const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                return r.values[i] + w * (r.values[i + 1] - r.values[i]);
            } else {
                return r(t);
            }
        },
        repr_);
}

std::optional<double> TimeFunction::constant_value() const {
    if (const auto* c = std::get_if<double>(&repr_)) return *c;
    return std::nullopt;
}

double TimeFunction::integral(double t) const {
    if (const auto* c = std::get_if<double>(&repr_)) return *c * t;
    if (const auto* s = std::get_if<Samples>(&repr_)) {
        // Exact integral of the piecewise-linear interpolant with constant
        // extension, accumulated over [min(0,t), max(0,t)].
        const double lo = std::min(0.0, t), hi = std::max(0.0, t);
        std::vector<double> knots{lo};
        for (double tk : s->times)
            if (tk > lo && tk < hi) knots.push_back(tk);
        knots.push_back(hi);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            acc += 0.5 * (knots[i + 1] - knots[i]) * ((*this)(knots[i]) + (*this)(knots[i + 1]));
        return t >= 0.0 ? acc : -acc;
    }
    const auto& f = std::get<std::function<double(double)>>(repr_);
    return integrate(f, 0.0, t, quadrature_tol);
}

void RiccatiModel::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be finite and >= 0");
    if (!std::isfinite(k0)) throw InvalidInput("k0 must be finite");
}

std::vector<double> integrate_rk4(const std::function<double(double, double)>& f, double y0,
                                  std::span<const double> t_grid, std::size_t steps) {
    if (t_grid.empty()) return {};
    if (steps == 0) throw InvalidInput("steps must be >= 1");
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidInput("t_grid must be ascending");
    const double span = t_grid.back() - t_grid.front();
    const double h_max = span > 0.0 ? span / static_cast<double>(steps) : 1.0;

    std::vector<double> out;
    out.reserve(t_grid.size());
    double y = y0;
    out.push_back(y);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double t0 = t_grid[i - 1];
        const double dt = t_grid[i] - t0;
        if (dt == 0.0) {
            out.push_back(y);
            continue;
        }
        const auto sub = static_cast<std::size_t>(std::ceil(dt / h_max - 1e-9));
        const double h = dt / static_cast<double>(std::max<std::size_t>(sub, 1));
        for (std::size_t s = 0; s < std::max<std::size_t>(sub, 1); ++s) {
            const double t = t0 + static_cast<double>(s) * h;
            const double k1 = f(t, y);
            const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
            const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
            const double k4 = f(t + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(y) || std::abs(y) > blowup_threshold)
                throw Blowup("solution blew up near t = " + std::to_string(t + h), t + h);
        }
        out.push_back(y);
    }
    return out;
}

std::vector<double> solve_riccati_numeric(const RiccatiModel& model, std::span<const double> t_grid,
                                          std::size_t steps) {
    model.validate();
    if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidInput("t_grid must start at 0");
    const auto& alpha = model.alpha;
    const double beta = model.beta;
    return integrate_rk4([&](double t, double k) { return riccati_rhs(k, alpha(t), beta); }, model.k0,
                         t_grid, steps);
}

double growth_integral(const TimeFunction& alpha, double t) {
    if (t == 0.0) return 0.0;
    if (const auto a = alpha.constant_value(); a && *a == 0.0) return t;
    return integrate([&](double s) { return std::exp(alpha.integral(s)); }, 0.0, t, quadrature_tol);
}

double riccati_closed_form(const RiccatiModel& model, double t) {
    model.validate();
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("t must be finite and >= 0");
    const double g = model.alpha.integral(t);
    const double f = growth_integral(model.alpha, t);
    const double denom = 1.0 + 0.8 * model.beta * model.k0 * f;
    if (!(denom > 0.0))
        throw FiniteTimeSingularity("closed-form denominator 1 + 0.8 beta k0 F(t) = " +
                                    std::to_string(denom) + " is not positive at t = " + std::to_string(t));
    return model.k0 * std::exp(g) / denom;
}

PerturbativeResult riccati_perturbative(const RiccatiModel& model, double t) {
    model.validate();
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("t must be finite and >= 0");
    const double g = model.alpha.integral(t);
    const double f = growth_integral(model.alpha, t);
    PerturbativeResult r;
    r.value = model.k0 * std::exp(g) * (1.0 - 0.8 * model.beta * model.k0 * f);
    r.expansion_parameter = 0.8 * model.beta * std::abs(model.k0) * f;
    r.valid = r.expansion_parameter < PerturbativeResult::validity_limit;
    return r;
}

}  // namespace kklab
