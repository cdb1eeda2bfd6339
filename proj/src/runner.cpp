#include "kklab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "kklab/painleve.hpp"
#include "kklab/riccati.hpp"
#include "kklab/soliton.hpp"
#include "kklab/spectral.hpp"
#include "kklab/stochastic.hpp"
#include "kklab/table.hpp"

namespace kklab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"soliton", "audit", "ode", "ensemble", "pde", "pii"};
    return names;
}

json default_config(const std::string& command) {
    json c;
    if (command == "soliton") {
        c = {{"k", 1.0},     {"x_min", -10.0}, {"x_max", 10.0}, {"nx", 201},
             {"t_min", 0.0}, {"t_max", 5.0},   {"nt", 51},      {"slice_t", 0.0}};
    } else if (command == "audit") {
        c = {{"k", 1.0}, {"alpha", 0.1}, {"beta", 0.01}};
    } else if (command == "ode") {
        // alpha: a number, or {"t": [...], "values": [...]} sampled and
        // linearly interpolated.
        c = {{"alpha", 1.0}, {"beta", 0.1}, {"k0", 1.0}, {"t_max", 2.0}, {"n_samples", 201}, {"steps", 10000}};
    } else if (command == "ensemble") {
        c = {{"sigma2", {0.05, 0.15, 0.25}},
             {"beta", 0.1},
             {"k0", 1.0},
             {"alpha0", 0.0},
             {"convention", "ito"},
             {"n_paths", 10000},
             {"dt", 1e-3},
             {"t_max", 4.0},
             {"sample_dt", 0.05},
             {"threads", 0}};
    } else if (command == "pde") {
        c = {{"initial", "soliton"},
             {"k", 1.0},
             {"gaussian_amplitude", 0.5},
             {"gaussian_width", 3.0},
             {"L", 80.0},
             {"N", 1024},
             {"dt", 2e-5},
             {"T", 0.1},
             {"alpha", 0.0},
             {"alpha_noise_sigma2", 0.0},
             {"beta", 0.01},
             {"scheme", "etdrk4"},
             {"dealias", true},
             {"nonlinear", true},
             {"sample_every", 50},
             {"snapshot_every", 0},
             {"binary_snapshot", false}};
    } else if (command == "pii") {
        c = {{"source", "direct"}, {"delta", 1.0},   {"q0", -1.0},  {"q0_prime", 1.0},
             {"z_start", 1.0},     {"z_end", 5.0},   {"steps", 10000}, {"n", 0.0},
             {"m", 1.0},           {"lambda", -0.08}, {"k0", 1.0},  {"t_max", 2.0}};
    } else {
        throw UsageError("unknown command '" + command + "'");
    }
    c["seed"] = std::uint64_t{0};
    c["out"] = "kklab_out";
    c["format"] = "csv";
    return c;
}

json load_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config file " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

json resolve_config(const RunRequest& request) {
    json resolved = default_config(request.command);

    json file = request.config;
    if (!file.is_object()) throw UsageError("config must be a JSON object");
    if (file.contains("config") && file.contains("command")) {
        // manifest from an earlier run
        if (file["command"] != request.command)
            throw UsageError("manifest was written by '" + file["command"].get<std::string>() + "', not '" +
                             request.command + "'");
        file = file["config"];
    }
    for (const auto& [key, value] : file.items()) {
        if (!resolved.contains(key))
            throw UsageError("unknown config key '" + key + "' for command '" + request.command + "'");
        const json& def = resolved[key];
        const bool ok = (def.is_number() && value.is_number()) || (def.is_boolean() && value.is_boolean()) ||
                        (def.is_string() && value.is_string()) ||
                        (def.is_array() && (value.is_array() || value.is_number())) ||
                        (key == "alpha" && request.command == "ode" && value.is_object());
        if (!ok) throw UsageError("config key '" + key + "' has the wrong type");
        resolved[key] = value;
    }
    if (request.seed) resolved["seed"] = *request.seed;
    if (request.out) resolved["out"] = *request.out;
    if (request.format) resolved["format"] = *request.format;
    return resolved;
}

namespace {

/// Typed, validated access to a resolved config.
class Params {
public:
    explicit Params(const json& j) : j_(j) {}

    double number(const std::string& key) const {
        const double v = j_.at(key).get<double>();
        if (!std::isfinite(v)) bad(key, "must be finite");
        return v;
    }
    double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0)) bad(key, "must be > 0");
        return v;
    }
    double non_negative(const std::string& key) const {
        const double v = number(key);
        if (!(v >= 0.0)) bad(key, "must be >= 0");
        return v;
    }
    std::size_t count(const std::string& key, std::size_t min = 0) const {
        const json& v = j_.at(key);
        if (v.is_number_integer()) {
            if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
                const auto n = v.get<std::uint64_t>();
                if (n < min) bad(key, "must be >= " + std::to_string(min));
                return static_cast<std::size_t>(n);
            }
        } else {
            const double d = v.get<double>();
            if (d >= 0.0 && d == std::floor(d) && d < 9e15) {
                if (d < static_cast<double>(min)) bad(key, "must be >= " + std::to_string(min));
                return static_cast<std::size_t>(d);
            }
        }
        bad(key, "must be a non-negative integer");
    }
    bool flag(const std::string& key) const { return j_.at(key).get<bool>(); }
    std::string choice(const std::string& key, std::initializer_list<const char*> options) const {
        const auto v = j_.at(key).get<std::string>();
        for (const char* o : options)
            if (v == o) return v;
        std::string list;
        for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
        bad(key, "must be one of " + list);
    }
    std::vector<double> numbers(const std::string& key) const {
        const json& v = j_.at(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else {
            for (const auto& e : v) {
                if (!e.is_number()) bad(key, "must contain only numbers");
                out.push_back(e.get<double>());
            }
        }
        if (out.empty()) bad(key, "must not be empty");
        for (double d : out)
            if (!std::isfinite(d)) bad(key, "must contain finite numbers");
        return out;
    }
    std::uint64_t seed() const {
        const json& v = j_.at("seed");
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            bad("seed", "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    [[noreturn]] static void bad(const std::string& key, const std::string& what) {
        throw UsageError("config key '" + key + "' " + what);
    }

private:
    const json& j_;
};

/// Wraps model-level validation errors so they surface as usage errors.
template <class F>
auto checked(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        throw UsageError("config key '" + key + "': " + e.what());
    } catch (const DomainError& e) {
        throw UsageError("config key '" + key + "': " + e.what());
    }
}

std::vector<double> uniform(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

struct Context {
    const json& config;
    Params p;
    fs::path dir;
    Format format;
    std::vector<std::string> files;

    void table(const Table& t, const std::string& stem) { files.push_back(write_table(t, dir, stem, format)); }
    void document(const json& j, const std::string& name) {
        write_text(dir / name, dump_json(j));
        files.push_back(name);
    }
};

void cmd_soliton(Context& ctx) {
    const auto& p = ctx.p;
    const double k = p.non_negative("k");
    const SolitonParams params(k);
    const double x_min = p.number("x_min"), x_max = p.number("x_max");
    if (!(x_max > x_min)) Params::bad("x_max", "must exceed x_min");
    const double t_min = p.number("t_min"), t_max = p.number("t_max");
    if (t_max < t_min) Params::bad("t_max", "must be >= t_min");
    const auto xs = uniform(x_min, x_max, p.count("nx", 2));
    const auto ts = uniform(t_min, t_max, p.count("nt", 1));

    Table surface({"t", "x", "u"});
    for (double t : ts)
        for (double x : xs) surface.add_row({t, x, soliton_profile(params, x, t)});
    ctx.table(surface, "soliton_surface");

    const double ts_slice = p.number("slice_t");
    Table slice({"t", "x", "u"});
    for (double x : xs) slice.add_row({ts_slice, x, soliton_profile(params, x, ts_slice)});
    ctx.table(slice, "soliton_slice");
}

json entry_json(const DiscrepancyEntry& e) {
    return {{"name", e.name},
            {"closed_form", e.closed_form},
            {"quadrature", e.quadrature},
            {"relative_error", e.relative_error},
            {"flagged", e.flagged}};
}

void cmd_audit(Context& ctx) {
    const auto& p = ctx.p;
    const double k = p.non_negative("k");
    const double alpha = p.number("alpha"), beta = p.number("beta");
    const SolitonParams params(k);
    const auto a = audit_momentum_derivation(params, alpha, beta);

    json report = {{"k", a.k},
                   {"alpha", a.alpha},
                   {"beta", a.beta},
                   {"closed_form_P", a.closed_form_P},
                   {"quadrature_P", a.quadrature_P},
                   {"normalized_P", soliton_momentum_paper(params)},
                   {"alpha_term_closed", a.alpha_term_closed},
                   {"alpha_term_quadrature", a.alpha_term_quadrature},
                   {"beta_term_closed", a.beta_term_closed},
                   {"beta_term_quadrature", a.beta_term_quadrature},
                   {"grad2_quadrature", a.grad2_quadrature},
                   {"cubic_flux_quadrature", a.cubic_flux_quadrature},
                   {"flag_tolerance", MomentumAudit::flag_tolerance}};
    report["comparisons"] = json::array();
    for (const auto& e : a.comparisons) report["comparisons"].push_back(entry_json(e));
    report["discrepancy_flags"] = json::array();
    for (const auto& e : a.discrepancy_flags) report["discrepancy_flags"].push_back(e.name);

    // closed forms of the full-line integral of sech^n
    const std::pair<int, double> exact[] = {{2, 2.0}, {4, 4.0 / 3.0}, {6, 16.0 / 15.0}, {8, 32.0 / 35.0}};
    report["sech_moments"] = json::array();
    for (const auto& [n, value] : exact) {
        const double q = sech_moment(n);
        report["sech_moments"].push_back({{"n", n},
                                          {"quadrature", q},
                                          {"closed_form", value},
                                          {"truncation", sech_truncation(n)},
                                          {"abs_error", std::abs(q - value)}});
    }
    ctx.document(report, "momentum_audit.json");
}

TimeFunction alpha_function(const json& alpha) {
    if (alpha.is_number()) return checked("alpha", [&] { return TimeFunction::constant(alpha.get<double>()); });
    if (!alpha.contains("t") || !alpha.contains("values") || alpha.size() != 2)
        Params::bad("alpha", "object must have exactly the keys 't' and 'values'");
    std::vector<double> ts, vs;
    try {
        ts = alpha["t"].get<std::vector<double>>();
        vs = alpha["values"].get<std::vector<double>>();
    } catch (const json::exception&) {
        Params::bad("alpha", "'t' and 'values' must be arrays of numbers");
    }
    return checked("alpha", [&] { return TimeFunction::sampled(std::move(ts), std::move(vs)); });
}

void cmd_ode(Context& ctx) {
    const auto& p = ctx.p;
    const RiccatiModel model{alpha_function(ctx.config.at("alpha")), p.non_negative("beta"), p.number("k0")};
    const auto ts = uniform(0.0, p.positive("t_max"), p.count("n_samples", 2));
    const auto numeric = solve_riccati_numeric(model, ts, p.count("steps", 1));

    Table t({"t", "k_numeric", "k_closed", "k_perturbative"});
    for (std::size_t i = 0; i < ts.size(); ++i)
        t.add_row({ts[i], numeric[i], riccati_closed_form(model, ts[i]), riccati_perturbative(model, ts[i]).value});
    ctx.table(t, "riccati_trajectory");
}

std::string sigma_label(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", s);
    return buf;
}

void cmd_ensemble(Context& ctx) {
    const auto& p = ctx.p;
    const auto sigmas = p.numbers("sigma2");
    for (double s : sigmas)
        if (s < 0.0) Params::bad("sigma2", "values must be >= 0");
    const double beta = p.non_negative("beta");
    const double k0 = p.number("k0");

    NoiseModel noise;
    noise.alpha0 = p.number("alpha0");
    noise.convention = p.choice("convention", {"ito", "stratonovich"}) == "ito" ? Convention::Ito
                                                                                 : Convention::Stratonovich;
    noise.seed = p.seed();
    noise.dt = p.positive("dt");
    const std::size_t n_paths = p.count("n_paths", 100);
    const auto threads = static_cast<unsigned>(p.count("threads"));

    const double t_max = p.positive("t_max");
    const double sample_dt = p.positive("sample_dt");
    const double ratio = sample_dt / noise.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
        Params::bad("sample_dt", "must be a positive integer multiple of dt");
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    const auto n_samples = static_cast<std::size_t>(std::floor(t_max / sample_dt + 1e-9)) + 1;
    std::vector<double> ts(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) ts[i] = static_cast<double>(i * stride) * noise.dt;

    Table fig3({"sigma2", "t", "mean_k2", "se_k2", "paper_formula"});
    Table fig4({"sigma2", "t", "mean_k2", "se_k2", "exact"});
    Table fig5({"sigma2", "t", "linearized_formula", "paper_formula", "mean_k2", "se_k2"});

    for (double s : sigmas) {
        noise.sigma2 = s;
        const auto damped = ensemble_moments(noise, beta, k0, ts, n_paths, threads);
        Table t({"t", "mean_k", "mean_k2", "se_k", "se_k2", "paper_formula", "linearized_formula", "survived"});
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double paper = paper_moment_formula(s, beta, k0, ts[i]).value;
            const double lin = linearized_moment_formula(s, beta, k0, ts[i]).value;
            t.add_row({ts[i], damped.mean_k[i], damped.mean_k2[i], damped.se_k[i], damped.se_k2[i], paper, lin,
                       static_cast<double>(damped.survived[i])});
            fig3.add_row({s, ts[i], damped.mean_k2[i], damped.se_k2[i], paper});
            if (s * ts[i] < 1.0)
                fig5.add_row({s, ts[i], lin, paper, damped.mean_k2[i], damped.se_k2[i]});
        }
        ctx.table(t, "ensemble_sigma2_" + sigma_label(s));

        const auto undamped = ensemble_moments(noise, 0.0, k0, ts, n_paths, threads);
        for (std::size_t i = 0; i < ts.size(); ++i)
            fig4.add_row({s, ts[i], undamped.mean_k2[i], undamped.se_k2[i],
                          paper_moment_formula(s, 0.0, k0, ts[i]).value});
    }
    ctx.table(fig3, "figure3");
    ctx.table(fig4, "figure4");
    ctx.table(fig5, "figure5");
}

void cmd_pde(Context& ctx) {
    const auto& p = ctx.p;
    const std::size_t N = p.count("N");
    const Grid grid = checked("N", [&] { return Grid(p.positive("L"), N); });

    PdeState initial;
    const std::string kind = p.choice("initial", {"soliton", "gaussian"});
    const SolitonParams soliton(p.non_negative("k"));
    if (kind == "soliton") {
        initial.u = sample_soliton(soliton, grid);
    } else {
        const double a = p.number("gaussian_amplitude"), w = p.positive("gaussian_width");
        initial.u.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double x = grid.x(j);
            initial.u[j] = a * std::exp(-x * x / (w * w));
        }
    }

    PdeConfig config;
    config.beta = p.non_negative("beta");
    config.dt = p.positive("dt");
    config.scheme = p.choice("scheme", {"etdrk4", "ifrk4"}) == "etdrk4" ? TimeScheme::ETDRK4
                                                                        : TimeScheme::IntegratingFactorRK4;
    config.dealias = p.flag("dealias");
    config.nonlinear = p.flag("nonlinear");

    const double T = p.positive("T");
    const double ratio = T / config.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) Params::bad("T", "must be an integer multiple of dt");
    const auto steps = static_cast<std::size_t>(std::llround(ratio));

    const double alpha = p.number("alpha");
    const double noise_sigma2 = p.non_negative("alpha_noise_sigma2");
    if (noise_sigma2 > 0.0) {
        // White-noise gain held constant over each step: the step average of
        // alpha0 + xi is alpha0 + dW/dt.
        NoiseModel noise;
        noise.alpha0 = alpha;
        noise.sigma2 = noise_sigma2;
        noise.seed = p.seed();
        noise.dt = config.dt;
        AlphaPath path{sample_path(noise, 0, steps)};
        for (double& v : path.values) v /= config.dt;
        config.alpha = std::move(path);
    } else {
        config.alpha = alpha;
    }

    const std::size_t sample_every = p.count("sample_every", 1);
    const std::size_t snapshot_every = p.count("snapshot_every");
    const auto traj = checked("dt", [&] { return run_pde(initial, config, grid, T, sample_every, snapshot_every); });

    Table diag({"t", "P", "grad2", "cubic_flux", "mass", "balance_residual"});
    double max_residual = 0.0, max_relative = 0.0;
    for (const auto& s : traj.samples) {
        const auto& d = s.diagnostics;
        diag.add_row({s.t, d.momentum, d.grad2, d.cubic_flux, d.mass, d.balance_residual});
        max_residual = std::max(max_residual, std::abs(d.balance_residual));
        if (d.momentum > 0.0) max_relative = std::max(max_relative, std::abs(d.balance_residual) / d.momentum);
    }
    ctx.table(diag, "pde_diagnostics");

    if (!traj.snapshots.empty()) {
        Table snaps({"t", "x", "u"});
        for (const auto& s : traj.snapshots)
            for (std::size_t j = 0; j < N; ++j) snaps.add_row({s.t, grid.x(j), s.u[j]});
        ctx.table(snaps, "pde_snapshots");
    }
    if (p.flag("binary_snapshot") && !traj.snapshots.empty()) {
        std::ofstream os(ctx.dir / "pde_final.kksnap", std::ios::binary | std::ios::trunc);
        const auto& last = traj.snapshots.back();
        write_snapshot(os, grid, PdeState{last.t, last.u});
        if (!os) throw std::runtime_error("failed writing pde_final.kksnap");
        ctx.files.push_back("pde_final.kksnap");
    }

    const auto& first = traj.samples.front().diagnostics;
    const auto& final = traj.samples.back().diagnostics;
    json report = {{"steps", traj.steps},
                   {"t_final", traj.samples.back().t},
                   {"initial_P", first.momentum},
                   {"final_P", final.momentum},
                   {"relative_P_change",
                    first.momentum > 0.0 ? (final.momentum - first.momentum) / first.momentum : 0.0},
                   {"initial_mass", first.mass},
                   {"final_mass", final.mass},
                   {"max_abs_balance_residual", max_residual},
                   {"max_relative_balance_residual", max_relative}};
    if (kind == "soliton" && soliton.k() > 0.0) {
        // How far the sech^2 ansatz is from solving the unperturbed equation.
        const auto r = soliton_residual(soliton, grid, config.dealias);
        report["ansatz_residual"] = {{"max_abs", r.max_abs}, {"l2", r.l2}, {"relative_l2", r.relative_l2}};
    }
    ctx.document(report, "pde_report.json");
}

void cmd_pii(Context& ctx) {
    const auto& p = ctx.p;
    const std::size_t steps = p.count("steps", 4);
    double delta, q0, q0_prime, z_start, z_end;
    json report;
    if (p.choice("source", {"direct", "momentum"}) == "direct") {
        delta = p.number("delta");
        q0 = p.number("q0");
        q0_prime = p.number("q0_prime");
        z_start = p.number("z_start");
        z_end = p.number("z_end");
        if (z_start == z_end) Params::bad("z_end", "must differ from z_start");
    } else {
        // Trajectory of dk/dt = n + m t + lambda k^2 from k(0) = k0 on [0, t_max].
        const double n = p.number("n"), m = p.number("m"), lambda = p.number("lambda"), k0 = p.number("k0");
        const double t_max = p.positive("t_max");
        PainleveProblem r;
        try {
            r = reduce_to_pii(n, m, lambda);
        } catch (const SingularScaling& e) {
            throw UsageError(std::string("config keys 'm'/'lambda': ") + e.what());
        }
        delta = r.delta;
        q0 = r.q_of_k(k0);
        q0_prime = r.dq_dz(n + lambda * k0 * k0);
        z_start = r.z_of_t(0.0);
        z_end = r.z_of_t(t_max);
        report["reduction"] = {{"n", n},           {"m", m},           {"lambda", lambda},
                               {"k_scale", r.k_scale}, {"z_scale", r.z_scale}, {"t_max", t_max}};
    }
    const auto sol = solve_pii(delta, q0, q0_prime, z_start, z_end, steps);

    Table t({"z", "q", "q_prime", "residual"});
    for (std::size_t i = 0; i < sol.z.size(); ++i) t.add_row({sol.z[i], sol.q[i], sol.q_prime[i], sol.residual[i]});
    ctx.table(t, "pii_solution");

    report["delta"] = delta;
    report["q0"] = q0;
    report["q0_prime"] = q0_prime;
    report["z_start"] = z_start;
    report["z_end"] = z_end;
    report["z_reached"] = sol.z.back();
    report["max_residual"] = sol.max_residual;
    report["residual_tolerance"] = PiiSolution::residual_tolerance;
    report["pole_encountered"] = sol.pole_encountered;
    report["pole_location"] = sol.pole_encountered ? json(sol.pole_location) : json(nullptr);
    report["accepted"] = sol.accepted();
    ctx.document(report, "pii_report.json");
}

}  // namespace

RunResult run(const RunRequest& request) {
    if (std::find(commands().begin(), commands().end(), request.command) == commands().end())
        throw UsageError("unknown command '" + request.command + "'");
    const json config = resolve_config(request);

    Format format;
    try {
        format = parse_format(config.at("format").get<std::string>());
    } catch (const InvalidInput& e) {
        throw UsageError(std::string("config key 'format': ") + e.what());
    }
    Context ctx{config, Params(config), fs::path(config.at("out").get<std::string>()), format, {}};
    ctx.p.seed();
    fs::create_directories(ctx.dir);

    const auto& c = request.command;
    if (c == "soliton") cmd_soliton(ctx);
    else if (c == "audit") cmd_audit(ctx);
    else if (c == "ode") cmd_ode(ctx);
    else if (c == "ensemble") cmd_ensemble(ctx);
    else if (c == "pde") cmd_pde(ctx);
    else cmd_pii(ctx);

    json manifest = {{"artifact", "kklab"},
                     {"version", KKLAB_VERSION},
                     {"command", c},
                     {"config", config},
                     {"outputs", ctx.files}};
    write_text(ctx.dir / "manifest.json", dump_json(manifest));
    ctx.files.push_back("manifest.json");
    return RunResult{ctx.dir, ctx.files, manifest};
}

int run_and_report(const RunRequest& request, std::ostream& out, std::ostream& err) {
    try {
        const auto result = run(request);
        for (const auto& f : result.files) out << (result.out_dir / f).string() << '\n';
        return exit_success;
    } catch (const UsageError& e) {
        err << "kklab: usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DivergedState& e) {
        err << "kklab: numerical divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const Blowup& e) {
        err << "kklab: numerical divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const FiniteTimeSingularity& e) {
        err << "kklab: numerical divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const DegenerateEnsemble& e) {
        err << "kklab: numerical divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const InvalidInput& e) {
        err << "kklab: usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "kklab: error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace kklab::cli
