#include "kklab/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kklab/errors.hpp"
#include "kklab/quadrature.hpp"

namespace kklab {

namespace {

double sech(double y) { return 1.0 / std::cosh(y); }

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(name) + " must be finite");
}

void require_real_branch(double k) {
    if (k < 0.0)
        throw DomainError("k must be >= 0: amplitude -2 k^{3/2} is real only on the k >= 0 branch");
}

// Half-width in x that covers |eta| <= eta_max for a soliton of width chi.
double x_extent(double chi, double eta_max) { return eta_max / chi; }

DiscrepancyEntry compare(std::string name, double closed, double quad) {
    DiscrepancyEntry e;
    e.name = std::move(name);
    e.closed_form = closed;
    e.quadrature = quad;
    e.relative_error =
        std::abs(closed - quad) / std::max(std::abs(closed), MomentumAudit::relative_floor);
    e.flagged = e.relative_error > MomentumAudit::flag_tolerance;
    return e;
}

}  // namespace

SolitonParams::SolitonParams(double k) : k_(k) { require_finite(k, "k"); }

double SolitonParams::amplitude() const {
    require_real_branch(k_);
    return -2.0 * std::pow(k_, 1.5);
}

double SolitonParams::width() const noexcept { return std::cbrt(k_); }

double SolitonParams::velocity() const noexcept { return 0.25 * k_ * k_; }

double soliton_profile(const SolitonParams& params, double x, double t) {
    require_finite(x, "x");
    require_finite(t, "t");
    const double a = params.amplitude();
    const double s = sech(params.width() * (x + params.velocity() * t));
    return a * s * s;
}

double soliton_profile_dx(const SolitonParams& params, double x, double t) {
    require_finite(x, "x");
    require_finite(t, "t");
    const double a = params.amplitude();
    const double chi = params.width();
    const double eta = chi * (x + params.velocity() * t);
    const double s = sech(eta);
    return -2.0 * a * chi * s * s * std::tanh(eta);
}

double sech_truncation(int n) { return std::max(40.0 / n, 20.0); }

double sech_moment(int n) {
    if (n != 2 && n != 4 && n != 6 && n != 8)
        throw UnsupportedOrder("sech_moment supports n in {2, 4, 6, 8}, got " + std::to_string(n));
    const double half = sech_truncation(n);
    auto f = [n](double eta) { return std::pow(sech(eta), n); };
    // Symmetric integrand: integrate one side and double.
    return 2.0 * integrate(f, 0.0, half);
}

double soliton_momentum_quadrature(const SolitonParams& params) {
    require_real_branch(params.k());
    if (params.k() == 0.0) return 0.0;
    const double half = x_extent(params.width(), sech_truncation(4));
    auto u2 = [&](double x) {
        const double u = soliton_profile(params, x, 0.0);
        return u * u;
    };
    return integrate(u2, -half, 0.0) + integrate(u2, 0.0, half);
}

double soliton_momentum_paper(const SolitonParams& params) { return -(8.0 / 3.0) * params.k(); }

MomentumAudit audit_momentum_derivation(const SolitonParams& params, double alpha, double beta) {
    require_real_branch(params.k());
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");

    MomentumAudit audit;
    audit.k = params.k();
    audit.alpha = alpha;
    audit.beta = beta;

    const double k = params.k();
    audit.sech4_quadrature = sech_moment(4);
    audit.sech6_quadrature = sech_moment(6);

    audit.closed_form_P = soliton_momentum_paper(params);
    audit.quadrature_P = soliton_momentum_quadrature(params);

    if (k > 0.0) {
        const double half = x_extent(params.width(), sech_truncation(4));
        auto ux2 = [&](double x) {
            const double d = soliton_profile_dx(params, x, 0.0);
            return d * d;
        };
        auto ux3 = [&](double x) {
            const double d = soliton_profile_dx(params, x, 0.0);
            return d * d * d;
        };
        audit.grad2_quadrature = integrate(ux2, -half, 0.0) + integrate(ux2, 0.0, half);
        audit.cubic_flux_quadrature = integrate(ux3, -half, 0.0) + integrate(ux3, 0.0, half);
    }

    // alpha term: -(2 alpha / chi) int u^2 d(eta) == -2 alpha int u^2 dx.
    audit.alpha_term_closed = -(8.0 / 3.0) * alpha * k;
    audit.alpha_term_quadrature = -2.0 * alpha * audit.quadrature_P;

    // beta term: -(2 beta / chi) chi^2 int u u_{eta eta} d(eta) == -2 beta int u_x^2 dx.
    audit.beta_term_closed = (32.0 / 15.0) * beta * k * k;
    audit.beta_term_quadrature = -2.0 * beta * audit.grad2_quadrature;

    audit.comparisons = {
        compare("momentum", audit.closed_form_P, audit.quadrature_P),
        compare("alpha_term", audit.alpha_term_closed, audit.alpha_term_quadrature),
        compare("beta_term", audit.beta_term_closed, audit.beta_term_quadrature),
        compare("sech4_moment", 4.0 / 3.0, audit.sech4_quadrature),
        compare("sech6_moment", 16.0 / 15.0, audit.sech6_quadrature),
    };
    for (const auto& c : audit.comparisons)
        if (c.flagged) audit.discrepancy_flags.push_back(c);
    return audit;
}

}  // namespace kklab
