#pragma once

#include <string>
#include <vector>

namespace kklab {

/// One-soliton ansatz u = A sech^2(chi (x + V t)) parameterized by the
/// momentum parameter k:  A = -2 k^{3/2},  chi = k^{1/3},  V = k^2 / 4.
class SolitonParams {
public:
    /// Throws InvalidInput for non-finite k. Negative k is accepted here and
    /// rejected by the operations that need the real-amplitude branch.
    explicit SolitonParams(double k);

    double k() const noexcept { return k_; }

    /// Throws DomainError for k < 0.
    double amplitude() const;
    double width() const noexcept;
    double velocity() const noexcept;

private:
    double k_;
};

double soliton_profile(const SolitonParams& params, double x, double t);

/// d/dx of soliton_profile.
double soliton_profile_dx(const SolitonParams& params, double x, double t);

/// Integral of sech^n over the real line, n in {2, 4, 6, 8}, by adaptive
/// Gauss-Kronrod quadrature on [-L, L] with L = max(40/n, 20).
double sech_moment(int n);

/// Truncation half-width used for sech^n quadrature.
double sech_truncation(int n);

/// Numeric integral of u^2 at t = 0.
double soliton_momentum_quadrature(const SolitonParams& params);

/// Normalized momentum law P = -(8/3) k used by the Riccati model.
double soliton_momentum_paper(const SolitonParams& params);

struct DiscrepancyEntry {
    std::string name;
    double closed_form = 0.0;
    double quadrature = 0.0;
    double relative_error = 0.0;
    bool flagged = false;
};

struct MomentumAudit {
    double k = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    double closed_form_P = 0.0;
    double quadrature_P = 0.0;
    double alpha_term_closed = 0.0;
    double alpha_term_quadrature = 0.0;
    double beta_term_closed = 0.0;
    double beta_term_quadrature = 0.0;

    double sech4_quadrature = 0.0;
    double sech6_quadrature = 0.0;
    double grad2_quadrature = 0.0;     // integral of u_x^2
    double cubic_flux_quadrature = 0.0;  // integral of u_x^3, odd integrand

    std::vector<DiscrepancyEntry> comparisons;
    /// Subset of `comparisons` whose relative error exceeds `flag_tolerance`.
    std::vector<DiscrepancyEntry> discrepancy_flags;

    static constexpr double flag_tolerance = 1e-6;
    static constexpr double relative_floor = 1e-30;
};

/// Compares the closed-form momentum-balance terms against direct quadrature
/// of the ansatz. Reports discrepancies; never throws on valid input.
MomentumAudit audit_momentum_derivation(const SolitonParams& params, double alpha, double beta);

}  // namespace kklab
