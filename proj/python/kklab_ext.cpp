#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "kklab/painleve.hpp"
#include "kklab/riccati.hpp"
#include "kklab/runner.hpp"
#include "kklab/soliton.hpp"
#include "kklab/spectral.hpp"
#include "kklab/stochastic.hpp"

namespace py = pybind11;
using namespace kklab;

namespace {

// alpha may be a float or a Python callable t -> float
TimeFunction to_time_function(const py::object& alpha) {
    if (PyCallable_Check(alpha.ptr())) {
        auto f = alpha.cast<std::function<double(double)>>();
        return TimeFunction::callable(std::move(f));
    }
    return TimeFunction::constant(alpha.cast<double>());
}

Convention to_convention(const std::string& name) {
    if (name == "ito") return Convention::Ito;
    if (name == "stratonovich") return Convention::Stratonovich;
    throw InvalidInput("convention must be 'ito' or 'stratonovich'");
}

NoiseModel make_noise(double alpha0, double sigma2, const std::string& convention, std::uint64_t seed, double dt) {
    NoiseModel n;
    n.alpha0 = alpha0;
    n.sigma2 = sigma2;
    n.convention = to_convention(convention);
    n.seed = seed;
    n.dt = dt;
    return n;
}

py::dict entry_dict(const DiscrepancyEntry& e) {
    py::dict d;
    d["name"] = e.name;
    d["closed_form"] = e.closed_form;
    d["quadrature"] = e.quadrature;
    d["relative_error"] = e.relative_error;
    d["flagged"] = e.flagged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "kklab numerical core";
    m.attr("__version__") = KKLAB_VERSION;

    // Derived exceptions are registered after their base so they translate first.
    static py::exception<Error> error(m, "KklabError", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<UnsupportedOrder>(m, "UnsupportedOrder", error.ptr());
    py::register_exception<DivergedState>(m, "DivergedState", error.ptr());
    py::register_exception<Blowup>(m, "Blowup", error.ptr());
    py::register_exception<FiniteTimeSingularity>(m, "FiniteTimeSingularity", error.ptr());
    py::register_exception<SingularScaling>(m, "SingularScaling", error.ptr());
    py::register_exception<PoleError>(m, "PoleError", error.ptr());
    py::register_exception<DegenerateEnsemble>(m, "DegenerateEnsemble", error.ptr());
    py::register_exception<cli::UsageError>(m, "UsageError", error.ptr());

    // --- soliton
    py::class_<SolitonParams>(m, "SolitonParams")
        .def(py::init<double>(), py::arg("k"))
        .def_property_readonly("k", &SolitonParams::k)
        .def_property_readonly("amplitude", &SolitonParams::amplitude)
        .def_property_readonly("width", &SolitonParams::width)
        .def_property_readonly("velocity", &SolitonParams::velocity);

    m.def("soliton_profile", &soliton_profile, py::arg("params"), py::arg("x"), py::arg("t") = 0.0);
    m.def("soliton_profile_dx", &soliton_profile_dx, py::arg("params"), py::arg("x"), py::arg("t") = 0.0);
    m.def("sech_moment", &sech_moment, py::arg("n"));
    m.def("soliton_momentum_quadrature", &soliton_momentum_quadrature, py::arg("params"));
    m.def("soliton_momentum_paper", &soliton_momentum_paper, py::arg("params"));
    m.def(
        "audit_momentum_derivation",
        [](const SolitonParams& p, double alpha, double beta) {
            const auto a = audit_momentum_derivation(p, alpha, beta);
            py::dict d;
            d["closed_form_P"] = a.closed_form_P;
            d["quadrature_P"] = a.quadrature_P;
            d["alpha_term_closed"] = a.alpha_term_closed;
            d["alpha_term_quadrature"] = a.alpha_term_quadrature;
            d["beta_term_closed"] = a.beta_term_closed;
            d["beta_term_quadrature"] = a.beta_term_quadrature;
            d["grad2_quadrature"] = a.grad2_quadrature;
            d["cubic_flux_quadrature"] = a.cubic_flux_quadrature;
            py::list comparisons, flags;
            for (const auto& e : a.comparisons) comparisons.append(entry_dict(e));
            for (const auto& e : a.discrepancy_flags) flags.append(e.name);
            d["comparisons"] = comparisons;
            d["discrepancy_flags"] = flags;
            return d;
        },
        py::arg("params"), py::arg("alpha"), py::arg("beta"));

    // --- momentum ODE
    m.def(
        "riccati_closed_form",
        [](const py::object& alpha, double beta, double k0, double t) {
            return riccati_closed_form(RiccatiModel{to_time_function(alpha), beta, k0}, t);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("k0"), py::arg("t"));
    m.def(
        "riccati_perturbative",
        [](const py::object& alpha, double beta, double k0, double t) {
            const auto r = riccati_perturbative(RiccatiModel{to_time_function(alpha), beta, k0}, t);
            return py::make_tuple(r.value, r.expansion_parameter, r.valid);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("k0"), py::arg("t"),
        "Returns (value, expansion_parameter, valid).");
    m.def(
        "solve_riccati_numeric",
        [](const py::object& alpha, double beta, double k0, const std::vector<double>& t_grid, std::size_t steps) {
            return solve_riccati_numeric(RiccatiModel{to_time_function(alpha), beta, k0}, t_grid, steps);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("k0"), py::arg("t_grid"), py::arg("steps") = 10000);

    // --- stochastic ensemble
    m.def(
        "ensemble_moments",
        [](double sigma2, double beta, double k0, const std::vector<double>& t_grid, std::size_t n_paths,
           double alpha0, const std::string& convention, std::uint64_t seed, double dt, unsigned threads) {
            const auto noise = make_noise(alpha0, sigma2, convention, seed, dt);
            EnsembleStats s;
            {
                py::gil_scoped_release release;
                s = ensemble_moments(noise, beta, k0, t_grid, n_paths, threads);
            }
            py::dict d;
            d["t"] = s.t_grid;
            d["mean_k"] = s.mean_k;
            d["mean_k2"] = s.mean_k2;
            d["se_k"] = s.se_k;
            d["se_k2"] = s.se_k2;
            d["survived"] = s.survived;
            d["n_paths"] = s.n_paths;
            return d;
        },
        py::arg("sigma2"), py::arg("beta"), py::arg("k0"), py::arg("t_grid"), py::arg("n_paths"),
        py::arg("alpha0") = 0.0, py::arg("convention") = "ito", py::arg("seed") = 0, py::arg("dt") = 1e-3,
        py::arg("threads") = 0);
    m.def(
        "sample_path",
        [](double alpha0, double sigma2, std::uint64_t seed, double dt, std::uint64_t path_index,
           std::size_t n_steps) {
            return sample_path(make_noise(alpha0, sigma2, "ito", seed, dt), path_index, n_steps);
        },
        py::arg("alpha0"), py::arg("sigma2"), py::arg("seed"), py::arg("dt"), py::arg("path_index"),
        py::arg("n_steps"));
    m.def(
        "paper_moment_formula",
        [](double sigma2, double beta, double k0, double t) {
            const auto r = paper_moment_formula(sigma2, beta, k0, t);
            return py::make_tuple(r.value, r.flagged);
        },
        py::arg("sigma2"), py::arg("beta"), py::arg("k0"), py::arg("t"), "Returns (value, flagged).");
    m.def(
        "linearized_moment_formula",
        [](double sigma2, double beta, double k0, double t) {
            const auto r = linearized_moment_formula(sigma2, beta, k0, t);
            return py::make_tuple(r.value, r.flagged);
        },
        py::arg("sigma2"), py::arg("beta"), py::arg("k0"), py::arg("t"), "Returns (value, flagged).");

    // --- spectral PDE
    py::class_<Grid>(m, "Grid")
        .def(py::init<double, std::size_t>(), py::arg("length"), py::arg("num_points"))
        .def_property_readonly("length", &Grid::length)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("dx", &Grid::dx)
        .def("points", &Grid::points)
        .def("wavenumber", &Grid::wavenumber);

    m.def("sample_soliton", &sample_soliton, py::arg("params"), py::arg("grid"), py::arg("t") = 0.0);
    m.def("kk_rhs", &kk_rhs, py::arg("u"), py::arg("grid"), py::arg("alpha"), py::arg("beta"),
          py::arg("dealias") = true);
    m.def(
        "momentum_balance_residual",
        [](const std::vector<double>& u, const Grid& g, double alpha, double beta) {
            return momentum_balance_residual(PdeState{0.0, u}, alpha, beta, g);
        },
        py::arg("u"), py::arg("grid"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "run_pde",
        [](const std::vector<double>& u0, const Grid& g, double T, double dt, double alpha, double beta,
           std::size_t sample_every, std::size_t snapshot_every, const std::string& scheme, bool dealias,
           bool nonlinear) {
            PdeConfig c;
            c.alpha = alpha;
            c.beta = beta;
            c.dt = dt;
            if (scheme == "etdrk4") c.scheme = TimeScheme::ETDRK4;
            else if (scheme == "ifrk4") c.scheme = TimeScheme::IntegratingFactorRK4;
            else throw InvalidInput("scheme must be 'etdrk4' or 'ifrk4'");
            c.dealias = dealias;
            c.nonlinear = nonlinear;
            PdeTrajectory traj;
            {
                py::gil_scoped_release release;
                traj = run_pde(PdeState{0.0, u0}, c, g, T, sample_every, snapshot_every);
            }
            py::dict d;
            std::vector<double> t, P, grad2, flux, mass, residual;
            for (const auto& s : traj.samples) {
                t.push_back(s.t);
                P.push_back(s.diagnostics.momentum);
                grad2.push_back(s.diagnostics.grad2);
                flux.push_back(s.diagnostics.cubic_flux);
                mass.push_back(s.diagnostics.mass);
                residual.push_back(s.diagnostics.balance_residual);
            }
            d["t"] = t;
            d["P"] = P;
            d["grad2"] = grad2;
            d["cubic_flux"] = flux;
            d["mass"] = mass;
            d["balance_residual"] = residual;
            py::list snaps;
            for (const auto& s : traj.snapshots) snaps.append(py::make_tuple(s.t, s.u));
            d["snapshots"] = snaps;
            d["steps"] = traj.steps;
            return d;
        },
        py::arg("u0"), py::arg("grid"), py::arg("T"), py::arg("dt") = 1e-4, py::arg("alpha") = 0.0,
        py::arg("beta") = 0.0, py::arg("sample_every") = 100, py::arg("snapshot_every") = 0,
        py::arg("scheme") = "etdrk4", py::arg("dealias") = true, py::arg("nonlinear") = true);

    // --- Painleve II
    py::class_<PainleveProblem>(m, "PainleveProblem")
        .def_readonly("n", &PainleveProblem::n)
        .def_readonly("m", &PainleveProblem::m)
        .def_readonly("lam", &PainleveProblem::lambda)
        .def_readonly("delta", &PainleveProblem::delta)
        .def_readonly("k_scale", &PainleveProblem::k_scale)
        .def_readonly("z_scale", &PainleveProblem::z_scale)
        .def("z_of_t", &PainleveProblem::z_of_t)
        .def("t_of_z", &PainleveProblem::t_of_z)
        .def("q_of_k", &PainleveProblem::q_of_k)
        .def("k_of_q", &PainleveProblem::k_of_q)
        .def("dq_dz", &PainleveProblem::dq_dz)
        .def("dk_dt", &PainleveProblem::dk_dt);

    m.def(
        "reduce_to_pii",
        [](double n, double mm, double lambda, std::optional<double> delta) {
            return delta ? reduce_to_pii(n, mm, lambda, *delta) : reduce_to_pii(n, mm, lambda);
        },
        py::arg("n"), py::arg("m"), py::arg("lam"), py::arg("delta") = py::none());

    py::class_<PiiSolution>(m, "PiiSolution")
        .def_readonly("delta", &PiiSolution::delta)
        .def_readonly("z", &PiiSolution::z)
        .def_readonly("q", &PiiSolution::q)
        .def_readonly("q_prime", &PiiSolution::q_prime)
        .def_readonly("residual", &PiiSolution::residual)
        .def_readonly("max_residual", &PiiSolution::max_residual)
        .def_readonly("pole_encountered", &PiiSolution::pole_encountered)
        .def_readonly("pole_location", &PiiSolution::pole_location)
        .def_property_readonly("accepted", &PiiSolution::accepted);

    m.def("solve_pii", &solve_pii, py::arg("delta"), py::arg("q0"), py::arg("q0_prime"), py::arg("z_start"),
          py::arg("z_end"), py::arg("steps"));
    m.def("pii_exact_rational", &pii_exact_rational, py::arg("delta"), py::arg("z"));

    // --- CLI runner; the package wraps these with dict <-> JSON conversion
    m.def("_default_config", [](const std::string& cmd) { return cli::default_config(cmd).dump(); });
    m.def(
        "_run",
        [](const std::string& cmd, const std::string& config, std::optional<std::string> out,
           std::optional<std::uint64_t> seed, std::optional<std::string> format) {
            cli::RunRequest r;
            r.command = cmd;
            try {
                r.config = nlohmann::json::parse(config);
            } catch (const nlohmann::json::parse_error& e) {
                throw cli::UsageError(e.what());
            }
            r.out = std::move(out);
            r.seed = seed;
            r.format = std::move(format);
            cli::RunResult res;
            {
                py::gil_scoped_release release;
                res = cli::run(r);
            }
            std::vector<std::string> paths;
            for (const auto& f : res.files) paths.push_back((res.out_dir / f).string());
            return paths;
        });
}
