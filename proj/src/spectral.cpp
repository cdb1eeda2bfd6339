#include "kklab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "kklab/errors.hpp"

namespace kklab {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(std::span<const Complex> v) {
    return std::all_of(v.begin(), v.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

Complex ipow(double kappa, int order) {
    // (i kappa)^order
    static constexpr Complex unit_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return unit_powers[order % 4] * std::pow(kappa, order);
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(double length, std::size_t num_points) : length_(length), n_(num_points) {
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidInput("grid length must be finite and > 0");
    if (num_points < 64 || !is_power_of_two(num_points))
        throw InvalidInput("grid size must be a power of two >= 64, got " + std::to_string(num_points));
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
    return xs;
}

double Grid::wavenumber(std::size_t j) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / length_;
}

double Grid::integrate(std::span<const double> f) const {
    double s = 0.0;
    for (double v : f) s += v;
    return s * dx();
}

// ---------------------------------------------------------------------------
// SpectralWorkspace

struct SpectralWorkspace::Impl {
    Grid grid;
    bool dealias;
    double* real_buf = nullptr;
    fftw_complex* spec_buf = nullptr;
    fftw_plan forward_plan = nullptr;
    fftw_plan inverse_plan = nullptr;

    std::vector<Complex> scratch_hat;
    std::vector<double> u, ux, uxx, flux;

    Impl(const Grid& g, bool d) : grid(g), dealias(d) {
        const auto n = static_cast<int>(g.size());
        std::lock_guard lock(planner_mutex());
        real_buf = fftw_alloc_real(g.size());
        spec_buf = fftw_alloc_complex(g.spectral_size());
        forward_plan = fftw_plan_dft_r2c_1d(n, real_buf, spec_buf, FFTW_ESTIMATE);
        inverse_plan = fftw_plan_dft_c2r_1d(n, spec_buf, real_buf, FFTW_ESTIMATE);
        scratch_hat.resize(g.spectral_size());
        u.resize(g.size());
        ux.resize(g.size());
        uxx.resize(g.size());
        flux.resize(g.size());
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(inverse_plan);
        fftw_destroy_plan(forward_plan);
        fftw_free(spec_buf);
        fftw_free(real_buf);
    }

    void forward(std::span<const double> in, std::span<Complex> out) {
        std::copy(in.begin(), in.end(), real_buf);
        fftw_execute(forward_plan);
        const auto* src = reinterpret_cast<const Complex*>(spec_buf);
        std::copy(src, src + grid.spectral_size(), out.begin());
    }

    void inverse(std::span<const Complex> in, std::span<double> out) {
        auto* dst = reinterpret_cast<Complex*>(spec_buf);
        std::copy(in.begin(), in.end(), dst);
        fftw_execute(inverse_plan);
        const double scale = 1.0 / static_cast<double>(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) out[j] = real_buf[j] * scale;
    }

    bool keeps(std::size_t j) const noexcept { return !dealias || 3 * j <= grid.size(); }

    // Spectral derivative in place on a half spectrum. The Nyquist mode is
    // dropped for every order so that discrete integration by parts is exact.
    void differentiate(std::span<Complex> hat, int order) const {
        const std::size_t nyq = grid.size() / 2;
        for (std::size_t j = 0; j < hat.size(); ++j)
            hat[j] = (j == nyq) ? Complex{} : hat[j] * ipow(grid.wavenumber(j), order);
    }
};

SpectralWorkspace::SpectralWorkspace(const Grid& grid, bool dealias)
    : impl_(std::make_unique<Impl>(grid, dealias)) {}
SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

const Grid& SpectralWorkspace::grid() const noexcept { return impl_->grid; }
bool SpectralWorkspace::dealias() const noexcept { return impl_->dealias; }
bool SpectralWorkspace::keeps_mode(std::size_t j) const noexcept { return impl_->keeps(j); }

void SpectralWorkspace::forward(std::span<const double> u, std::span<Complex> u_hat) {
    impl_->forward(u, u_hat);
}

void SpectralWorkspace::inverse(std::span<const Complex> u_hat, std::span<double> u) {
    impl_->inverse(u_hat, u);
}

std::vector<double> SpectralWorkspace::derivative(std::span<const double> u, int order) {
    auto& hat = impl_->scratch_hat;
    impl_->forward(u, hat);
    impl_->differentiate(hat, order);
    std::vector<double> out(u.size());
    impl_->inverse(hat, out);
    return out;
}

void SpectralWorkspace::nonlinear(std::span<const Complex> u_hat, std::span<Complex> out) {
    auto& s = *impl_;
    auto& hat = s.scratch_hat;

    s.inverse(u_hat, s.u);
    std::copy(u_hat.begin(), u_hat.end(), hat.begin());
    s.differentiate(hat, 1);
    s.inverse(hat, s.ux);
    std::copy(u_hat.begin(), u_hat.end(), hat.begin());
    s.differentiate(hat, 2);
    s.inverse(hat, s.uxx);

    for (std::size_t j = 0; j < s.u.size(); ++j) {
        const double u = s.u[j];
        s.flux[j] = -(4.0 / 3.0) * u * u * u + 15.0 * u * s.uxx[j] + 11.25 * s.ux[j] * s.ux[j];
    }
    s.forward(s.flux, out);
    s.differentiate(out, 1);
    for (std::size_t j = 0; j < out.size(); ++j)
        if (!s.keeps(j)) out[j] = Complex{};
}

// ---------------------------------------------------------------------------
// Right-hand side and diagnostics

namespace {

std::vector<double> rhs_with(SpectralWorkspace& ws, std::span<const double> u, double alpha_val,
                             double beta) {
    const Grid& grid = ws.grid();
    std::vector<Complex> u_hat(grid.spectral_size());
    std::vector<Complex> tend(grid.spectral_size());
    ws.forward(u, u_hat);
    ws.nonlinear(u_hat, tend);
    const std::size_t nyq = grid.size() / 2;
    for (std::size_t j = 0; j < u_hat.size(); ++j) {
        if (j == nyq) {
            tend[j] = Complex{};
            continue;
        }
        const double kappa = grid.wavenumber(j);
        const double k2 = kappa * kappa;
        // -(i kappa)^5 = -i kappa^5
        tend[j] += (Complex{alpha_val - beta * k2, -k2 * k2 * kappa}) * u_hat[j];
    }
    std::vector<double> out(grid.size());
    ws.inverse(tend, out);
    return out;
}

void check_field(std::span<const double> u, double t) {
    if (!all_finite(u)) throw DivergedState("non-finite field value", t);
}

}  // namespace

std::vector<double> kk_rhs(std::span<const double> u, const Grid& grid, double alpha_val,
                           double beta, bool dealias) {
    if (u.size() != grid.size()) throw InvalidInput("field length does not match grid size");
    check_field(u, 0.0);
    SpectralWorkspace ws(grid, dealias);
    return rhs_with(ws, u, alpha_val, beta);
}

namespace {

PdeDiagnostics diagnostics_with(SpectralWorkspace& ws, const PdeState& state, double alpha_val,
                                double beta) {
    const Grid& grid = ws.grid();
    const auto& u = state.u;
    const auto ux = ws.derivative(u, 1);
    const auto ut = rhs_with(ws, u, alpha_val, beta);

    PdeDiagnostics d;
    double p = 0.0, g2 = 0.0, c3 = 0.0, m = 0.0, uut = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        p += u[j] * u[j];
        g2 += ux[j] * ux[j];
        c3 += ux[j] * ux[j] * ux[j];
        m += u[j];
        uut += u[j] * ut[j];
    }
    const double dx = grid.dx();
    d.momentum = p * dx;
    d.grad2 = g2 * dx;
    d.cubic_flux = c3 * dx;
    d.mass = m * dx;
    const double dpdt = 2.0 * uut * dx;
    d.balance_residual =
        dpdt - (2.0 * alpha_val * d.momentum - 2.0 * beta * d.grad2 - 7.5 * d.cubic_flux);
    return d;
}

}  // namespace

PdeDiagnostics compute_diagnostics(const PdeState& state, const Grid& grid, double alpha_val,
                                   double beta, bool dealias) {
    if (state.u.size() != grid.size()) throw InvalidInput("field length does not match grid size");
    check_field(state.u, state.t);
    SpectralWorkspace ws(grid, dealias);
    return diagnostics_with(ws, state, alpha_val, beta);
}

double momentum_balance_residual(const PdeState& state, double alpha_val, double beta,
                                 const Grid& grid, bool dealias) {
    return compute_diagnostics(state, grid, alpha_val, beta, dealias).balance_residual;
}

// ---------------------------------------------------------------------------
// Time stepping

struct PdeStepper::Impl {
    Grid grid;
    PdeConfig config;
    SpectralWorkspace ws;
    bool alpha_in_linear = false;

    std::vector<Complex> lin, e1, e2;     // L, exp(L dt), exp(L dt / 2)
    std::vector<Complex> q, f1, f2, f3;   // ETDRK4 coefficients

    std::vector<Complex> v, a, b, c, nv, na, nb, nc, tmp;

    Impl(const Grid& g, PdeConfig cfg) : grid(g), config(std::move(cfg)), ws(g, config.dealias) {
        if (!(config.dt != 0.0) || !std::isfinite(config.dt)) throw InvalidInput("dt must be finite and nonzero");
        if (!(config.beta >= 0.0)) throw InvalidInput("beta must be >= 0");
        if (config.scheme == TimeScheme::IntegratingFactorRK4) {
            const double km = grid.max_wavenumber();
            const double phase = std::abs(config.dt) * std::pow(km, 5);
            if (!(phase < 2.0 * std::numbers::pi))
                throw InvalidInput("integrating-factor step rotates the highest mode by " +
                                   std::to_string(phase) + " rad per step (limit 2*pi); reduce dt");
        }
        const auto* constant = std::get_if<double>(&config.alpha);
        alpha_in_linear = constant != nullptr;
        const double alpha_lin = alpha_in_linear ? *constant : 0.0;

        const std::size_t m = grid.spectral_size();
        lin.resize(m);
        e1.resize(m);
        e2.resize(m);
        const double h = config.dt;
        for (std::size_t j = 0; j < m; ++j) {
            const double kappa = grid.wavenumber(j);
            const double k2 = kappa * kappa;
            lin[j] = Complex{alpha_lin - config.beta * k2, -k2 * k2 * kappa};
            e1[j] = std::exp(lin[j] * h);
            e2[j] = std::exp(lin[j] * (0.5 * h));
        }
        if (config.scheme == TimeScheme::ETDRK4) build_etd_coefficients();

        for (auto* w : {&v, &a, &b, &c, &nv, &na, &nb, &nc, &tmp}) w->resize(m);
    }

    // Contour-integral evaluation of the phi-functions (full circle, since L
    // is complex).
    void build_etd_coefficients() {
        constexpr int points = 32;
        const std::size_t m = grid.spectral_size();
        const double h = config.dt;
        q.resize(m);
        f1.resize(m);
        f2.resize(m);
        f3.resize(m);
        std::vector<Complex> roots(points);
        for (int r = 0; r < points; ++r)
            roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * (r + 0.5) / points);
        for (std::size_t j = 0; j < m; ++j) {
            Complex sq{}, s1{}, s2{}, s3{};
            for (const auto& root : roots) {
                const Complex z = lin[j] * h + root;
                const Complex ez = std::exp(z);
                const Complex z3 = z * z * z;
                sq += (std::exp(0.5 * z) - 1.0) / z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                s2 += (2.0 + z + ez * (z - 2.0)) / z3;
                s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            q[j] = h * sq / double(points);
            f1[j] = h * s1 / double(points);
            f2[j] = h * s2 / double(points);
            f3[j] = h * s3 / double(points);
        }
    }

    double alpha_at(std::size_t index, double t) const {
        return std::visit(
            [&](const auto& a) -> double {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, double>) {
                    return a;
                } else if constexpr (std::is_same_v<T, AlphaPath>) {
                    if (a.values.empty()) throw InvalidInput("alpha path is empty");
                    return a.values[std::min(index, a.values.size() - 1)];
                } else {
                    return a(t);
                }
            },
            config.alpha);
    }

    // Nonlinear part plus any explicitly treated (time-dependent) gain.
    void nonlin(std::span<const Complex> in, std::span<Complex> out, double alpha_explicit) {
        if (config.nonlinear) {
            ws.nonlinear(in, out);
        } else {
            std::fill(out.begin(), out.end(), Complex{});
        }
        if (!alpha_in_linear && alpha_explicit != 0.0)
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += alpha_explicit * in[j];
    }

    PdeState advance(const PdeState& state, std::size_t index) {
        if (state.u.size() != grid.size()) throw InvalidInput("field length does not match grid size");
        const double h = config.dt;
        // Callables are sampled at the stage times; per-step paths are frozen.
        double al0 = 0.0, alh = 0.0, al1 = 0.0;
        if (!alpha_in_linear) {
            al0 = alpha_at(index, state.t);
            const bool frozen = std::holds_alternative<AlphaPath>(config.alpha);
            alh = frozen ? al0 : alpha_at(index, state.t + 0.5 * h);
            al1 = frozen ? al0 : alpha_at(index, state.t + h);
        }
        const std::size_t m = grid.spectral_size();
        ws.forward(state.u, v);

        if (config.scheme == TimeScheme::ETDRK4) {
            nonlin(v, nv, al0);
            for (std::size_t j = 0; j < m; ++j) a[j] = e2[j] * v[j] + q[j] * nv[j];
            nonlin(a, na, alh);
            for (std::size_t j = 0; j < m; ++j) b[j] = e2[j] * v[j] + q[j] * na[j];
            nonlin(b, nb, alh);
            for (std::size_t j = 0; j < m; ++j) c[j] = e2[j] * a[j] + q[j] * (2.0 * nb[j] - nv[j]);
            nonlin(c, nc, al1);
            for (std::size_t j = 0; j < m; ++j)
                v[j] = e1[j] * v[j] + f1[j] * nv[j] + 2.0 * f2[j] * (na[j] + nb[j]) + f3[j] * nc[j];
        } else {
            nonlin(v, nv, al0);
            for (std::size_t j = 0; j < m; ++j) tmp[j] = e2[j] * (v[j] + 0.5 * h * nv[j]);
            nonlin(tmp, na, alh);
            for (std::size_t j = 0; j < m; ++j) tmp[j] = e2[j] * v[j] + 0.5 * h * na[j];
            nonlin(tmp, nb, alh);
            for (std::size_t j = 0; j < m; ++j) tmp[j] = e1[j] * v[j] + h * e2[j] * nb[j];
            nonlin(tmp, nc, al1);
            for (std::size_t j = 0; j < m; ++j)
                v[j] = e1[j] * v[j] +
                       (h / 6.0) * (e1[j] * nv[j] + 2.0 * e2[j] * (na[j] + nb[j]) + nc[j]);
        }

        if (!all_finite(std::span<const Complex>(v)))
            throw DivergedState("solution diverged after t = " + std::to_string(state.t), state.t);
        PdeState next;
        next.t = state.t + h;
        next.u.resize(grid.size());
        ws.inverse(v, next.u);
        return next;
    }
};

PdeStepper::PdeStepper(const Grid& grid, PdeConfig config)
    : impl_(std::make_unique<Impl>(grid, std::move(config))) {}
PdeStepper::~PdeStepper() = default;
PdeStepper::PdeStepper(PdeStepper&&) noexcept = default;
PdeStepper& PdeStepper::operator=(PdeStepper&&) noexcept = default;

const PdeConfig& PdeStepper::config() const noexcept { return impl_->config; }
const Grid& PdeStepper::grid() const noexcept { return impl_->grid; }
double PdeStepper::alpha_at(std::size_t index, double t) const { return impl_->alpha_at(index, t); }
PdeState PdeStepper::step(const PdeState& state, std::size_t index) { return impl_->advance(state, index); }

PdeState step(const PdeState& state, const PdeConfig& config, const Grid& grid) {
    PdeStepper stepper(grid, config);
    return stepper.step(state, 0);
}

PdeTrajectory run_pde(const PdeState& initial, const PdeConfig& config, const Grid& grid,
                      double T, std::size_t sample_every, std::size_t snapshot_every) {
    if (!(T > 0.0)) throw InvalidInput("T must be > 0");
    if (!(config.dt > 0.0)) throw InvalidInput("dt must be > 0 for run_pde");
    if (sample_every == 0) throw InvalidInput("sample_every must be >= 1");
    const double ratio = T / config.dt;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        throw InvalidInput("T must be an integer multiple of dt");
    if (const auto* path = std::get_if<AlphaPath>(&config.alpha); path && path->values.size() < steps)
        throw InvalidInput("alpha path has " + std::to_string(path->values.size()) +
                           " samples but the run needs " + std::to_string(steps));
    check_field(initial.u, initial.t);

    PdeStepper stepper(grid, config);
    SpectralWorkspace ws(grid, config.dealias);
    PdeTrajectory traj;
    traj.steps = steps;

    auto record = [&](const PdeState& s, std::size_t n) {
        if (n % sample_every == 0 || n == steps)
            traj.samples.push_back({s.t, diagnostics_with(ws, s, stepper.alpha_at(n, s.t), config.beta)});
        if (snapshot_every != 0 && (n % snapshot_every == 0 || n == steps))
            traj.snapshots.push_back({s.t, s.u});
    };

    PdeState state = initial;
    record(state, 0);
    for (std::size_t n = 0; n < steps; ++n) {
        PdeState next = stepper.step(state, n);
        // Step times are t0 + n dt exactly, not accumulated.
        next.t = initial.t + static_cast<double>(n + 1) * config.dt;
        state = std::move(next);
        record(state, n + 1);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Soliton helpers

std::vector<double> sample_soliton(const SolitonParams& params, const Grid& grid, double t) {
    std::vector<double> u(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) u[j] = soliton_profile(params, grid.x(j), t);
    return u;
}

AnsatzResidual soliton_residual(const SolitonParams& params, const Grid& grid, bool dealias) {
    const auto u = sample_soliton(params, grid);
    SpectralWorkspace ws(grid, dealias);
    const auto ux = ws.derivative(u, 1);
    const auto rhs = rhs_with(ws, u, 0.0, 0.0);
    const double v = params.velocity();
    AnsatzResidual r;
    double s = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double e = v * ux[j] - rhs[j];
        r.max_abs = std::max(r.max_abs, std::abs(e));
        s += e * e;
        ref += v * v * ux[j] * ux[j];
    }
    r.l2 = std::sqrt(s * grid.dx());
    const double ref_l2 = std::sqrt(ref * grid.dx());
    r.relative_l2 = ref_l2 > 0.0 ? r.l2 / ref_l2 : r.l2;
    return r;
}

// ---------------------------------------------------------------------------
// Binary snapshots

namespace {

constexpr char snapshot_magic[8] = {'K', 'K', '1', 'S', 'N', 'A', 'P', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(bytes, 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw InvalidInput("truncated snapshot");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_snapshot(std::ostream& os, const Grid& grid, const PdeState& state) {
    if (state.u.size() != grid.size()) throw InvalidInput("field length does not match grid size");
    os.write(snapshot_magic, 8);
    put_u64(os, grid.size());
    put_f64(os, grid.length());
    put_f64(os, state.t);
    for (double v : state.u) put_f64(os, v);
}

std::pair<Grid, PdeState> read_snapshot(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, snapshot_magic, 8) != 0)
        throw InvalidInput("not a KK1SNAP1 snapshot");
    const auto n = get_u64(is);
    const double length = get_f64(is);
    Grid grid(length, static_cast<std::size_t>(n));
    PdeState state;
    state.t = get_f64(is);
    state.u.resize(n);
    for (auto& v : state.u) v = get_f64(is);
    return {grid, state};
}

}  // namespace kklab
