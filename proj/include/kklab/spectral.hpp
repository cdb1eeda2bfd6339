#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "kklab/soliton.hpp"

namespace kklab {

using Complex = std::complex<double>;

/// Periodic grid on [-L/2, L/2) with N points, N a power of two >= 64.
class Grid {
public:
    Grid(double length, std::size_t num_points);

    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t spectral_size() const noexcept { return n_ / 2 + 1; }
    double dx() const noexcept { return length_ / static_cast<double>(n_); }
    double x(std::size_t j) const noexcept { return -0.5 * length_ + static_cast<double>(j) * dx(); }
    std::vector<double> points() const;

    /// Wavenumber of half-spectrum index j in [0, N/2].
    double wavenumber(std::size_t j) const noexcept;
    double max_wavenumber() const noexcept { return wavenumber(n_ / 2); }

    /// Discrete integral sum(f) * dx.
    double integrate(std::span<const double> f) const;

private:
    double length_;
    std::size_t n_;
};

/// Owns FFTW plans and scratch buffers for one grid. One instance per
/// simulation; instances are not shareable across threads.
class SpectralWorkspace {
public:
    SpectralWorkspace(const Grid& grid, bool dealias);
    ~SpectralWorkspace();
    SpectralWorkspace(SpectralWorkspace&&) noexcept;
    SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const noexcept;
    bool dealias() const noexcept;

    void forward(std::span<const double> u, std::span<Complex> u_hat);
    void inverse(std::span<const Complex> u_hat, std::span<double> u);

    /// Spectral derivative of the given order.
    std::vector<double> derivative(std::span<const double> u, int order);

    /// True when half-spectrum index j survives the 2/3-rule filter.
    bool keeps_mode(std::size_t j) const noexcept;

    /// Nonlinear tendency of the unperturbed equation in spectral space,
    ///   d/dx [ -(4/3) u^3 + 15 u u_xx + (45/4) u_x^2 ],
    /// which equals -4u^2u_x + (75/2)u_x u_xx + 15 u u_xxx. Products are formed
    /// in physical space; the result is dealiased when enabled.
    void nonlinear(std::span<const Complex> u_hat, std::span<Complex> out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Full right-hand side
///   u_t = -4u^2u_x + (75/2)u_x u_xx + 15u u_xxx - u_xxxxx + alpha u + beta u_xx.
/// Throws DivergedState (time 0) on non-finite input.
std::vector<double> kk_rhs(std::span<const double> u, const Grid& grid, double alpha_val,
                           double beta, bool dealias = true);

struct PdeDiagnostics {
    double momentum = 0.0;        // sum u^2 dx
    double grad2 = 0.0;           // sum u_x^2 dx
    double cubic_flux = 0.0;      // sum u_x^3 dx
    double mass = 0.0;            // sum u dx
    double balance_residual = 0.0;
};

struct PdeState {
    double t = 0.0;
    std::vector<double> u;
};

PdeDiagnostics compute_diagnostics(const PdeState& state, const Grid& grid, double alpha_val,
                                   double beta, bool dealias = true);

/// R = 2 sum(u u_t) dx - [2 alpha P - 2 beta sum(u_x^2) dx - (15/2) sum(u_x^3) dx].
/// Vanishes for any resolved field: the bracket is the exact integration-by-parts
/// image of 2 int u u_t.
double momentum_balance_residual(const PdeState& state, double alpha_val, double beta,
                                 const Grid& grid, bool dealias = true);

enum class TimeScheme { IntegratingFactorRK4, ETDRK4 };

/// Per-step samples of alpha; step n uses element n.
struct AlphaPath {
    std::vector<double> values;
};

using AlphaForcing = std::variant<double, std::function<double(double)>, AlphaPath>;

struct PdeConfig {
    AlphaForcing alpha = 0.0;
    double beta = 0.0;
    double dt = 1e-4;
    TimeScheme scheme = TimeScheme::ETDRK4;
    bool dealias = true;
    bool nonlinear = true;
};

/// Single-simulation time stepper. Precomputes the exponential coefficients
/// for the stiff linear operator -i k^5 - beta k^2 (+ alpha when constant).
/// A callable alpha is evaluated at the Runge-Kutta stage times; an AlphaPath
/// is frozen over each step.
class PdeStepper {
public:
    PdeStepper(const Grid& grid, PdeConfig config);
    ~PdeStepper();
    PdeStepper(PdeStepper&&) noexcept;
    PdeStepper& operator=(PdeStepper&&) noexcept;

    const PdeConfig& config() const noexcept;
    const Grid& grid() const noexcept;

    /// Value of alpha used on step `index` starting at time t.
    double alpha_at(std::size_t index, double t) const;

    /// Advances by one dt. `index` selects the AlphaPath entry.
    PdeState step(const PdeState& state, std::size_t index = 0);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience one-step wrapper (builds a stepper on every call).
PdeState step(const PdeState& state, const PdeConfig& config, const Grid& grid);

struct PdeSample {
    double t = 0.0;
    PdeDiagnostics diagnostics;
};

struct PdeSnapshot {
    double t = 0.0;
    std::vector<double> u;
};

struct PdeTrajectory {
    std::vector<PdeSample> samples;
    std::vector<PdeSnapshot> snapshots;
    std::size_t steps = 0;
};

/// Integrates to time T (a multiple of dt), sampling diagnostics every
/// `sample_every` steps and storing fields every `snapshot_every` steps (0 = never).
PdeTrajectory run_pde(const PdeState& initial, const PdeConfig& config, const Grid& grid,
                      double T, std::size_t sample_every, std::size_t snapshot_every = 0);

/// Soliton ansatz sampled on the grid at time t.
std::vector<double> sample_soliton(const SolitonParams& params, const Grid& grid, double t = 0.0);

struct AnsatzResidual {
    double max_abs = 0.0;
    double l2 = 0.0;
    double relative_l2 = 0.0;  // l2 / ||V u_x||
};

/// Residual of the travelling-wave ansatz in the unperturbed equation:
/// V u_x - rhs(u) with rhs at alpha = beta = 0.
AnsatzResidual soliton_residual(const SolitonParams& params, const Grid& grid, bool dealias = true);

/// Binary snapshot: magic "KK1SNAP1", uint64 N, float64 L, float64 t, N float64
/// samples, all little-endian.
void write_snapshot(std::ostream& os, const Grid& grid, const PdeState& state);
std::pair<Grid, PdeState> read_snapshot(std::istream& is);

}  // namespace kklab
