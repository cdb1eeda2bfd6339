#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "kklab/runner.hpp"
#include "kklab/table.hpp"

using namespace kklab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("kklab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
    std::ifstream is(p);
    std::string line;
    std::getline(is, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

cli::RunResult run(const std::string& cmd, json config, const fs::path& out, std::uint64_t seed = 0) {
    cli::RunRequest r;
    r.command = cmd;
    r.config = std::move(config);
    r.out = out.string();
    r.seed = seed;
    return cli::run(r);
}

int shell(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" KKLAB_CLI_PATH "' " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("dump_json") {
    const json j = {{"a", 0.1}, {"b", {1, 2}}, {"c", std::nan("")}, {"d", "x"}};
    const auto text = dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("[1, 2]") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
    CHECK(json::parse(text)["a"].get<double>() == 0.1);
}

TEST_CASE("soliton command") {
    TempDir tmp;
    SUBCASE("surface layout and crest") {
        const auto res = run("soliton", {{"k", 1.0}, {"nx", 201}, {"nt", 6}}, tmp.path);
        CHECK(res.files == std::vector<std::string>{"soliton_surface.csv", "soliton_slice.csv", "manifest.json"});
        std::string header;
        const auto rows = read_csv(tmp.path / "soliton_surface.csv", &header);
        CHECK(header == "t,x,u");
        REQUIRE(rows.size() == 201 * 6);
        for (std::size_t r = 0; r < 6; ++r) {
            std::size_t arg = r * 201;
            for (std::size_t i = r * 201; i < (r + 1) * 201; ++i)
                if (rows[i][2] < rows[arg][2]) arg = i;
            const double t = rows[arg][0];
            CHECK(rows[arg][2] == doctest::Approx(-2.0).epsilon(0.01));
            CHECK(std::abs(rows[arg][1] + 0.25 * t) <= 0.05 + 1e-12);
        }
    }
    SUBCASE("k = 0 is the zero field") {
        run("soliton", {{"k", 0.0}, {"nx", 11}, {"nt", 3}}, tmp.path);
        for (const auto& row : read_csv(tmp.path / "soliton_surface.csv")) CHECK(row[2] == 0.0);
    }
    SUBCASE("invalid config names the key") {
        CHECK_THROWS_WITH_AS(run("soliton", {{"k", -1.0}}, tmp.path), doctest::Contains("'k'"), cli::UsageError);
        CHECK_THROWS_WITH_AS(run("soliton", {{"nx", 1}}, tmp.path), doctest::Contains("'nx'"), cli::UsageError);
        CHECK_THROWS_WITH_AS(run("soliton", {{"bogus", 1}}, tmp.path), doctest::Contains("'bogus'"),
                             cli::UsageError);
        CHECK_THROWS_WITH_AS(run("soliton", {{"k", "one"}}, tmp.path), doctest::Contains("'k'"), cli::UsageError);
    }
}

TEST_CASE("default soliton run matches the golden files") {
    TempDir tmp;
    run("soliton", json::object(), tmp.path);
    for (const char* name : {"soliton_surface.csv", "soliton_slice.csv"}) {
        std::string h1, h2;
        const auto got = read_csv(tmp.path / name, &h1);
        const auto want = read_csv(fs::path(KKLAB_GOLDEN_DIR) / name, &h2);
        CHECK(h1 == h2);
        REQUIRE(got.size() == want.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i)
            for (std::size_t c = 0; c < got[i].size(); ++c)
                worst = std::max(worst, std::abs(got[i][c] - want[i][c]) / std::max(1e-300, std::abs(want[i][c])));
        // libm differences may move the last digit
        CHECK(worst < 1e-14);
    }
    const auto golden = cli::load_config_file(fs::path(KKLAB_GOLDEN_DIR) / "manifest.json");
    CHECK(golden["config"] == cli::default_config("soliton"));
}

TEST_CASE("audit command") {
    TempDir tmp;
    run("audit", {{"k", 2.0}}, tmp.path);
    const auto j = cli::load_config_file(tmp.path / "momentum_audit.json");
    CHECK(j["quadrature_P"].get<double>() == doctest::Approx(33.8645557753215887947030536378).epsilon(1e-12));
    CHECK(j["sech_moments"].size() == 4);
    for (const auto& m : j["sech_moments"]) CHECK(m["abs_error"].get<double>() < 1e-10);
    CHECK(std::abs(j["cubic_flux_quadrature"].get<double>()) < 1e-10);
}

TEST_CASE("ode command") {
    TempDir tmp;
    SUBCASE("three-way trajectory") {
        run("ode", {{"n_samples", 11}}, tmp.path);
        std::string header;
        const auto rows = read_csv(tmp.path / "riccati_trajectory.csv", &header);
        CHECK(header == "t,k_numeric,k_closed,k_perturbative");
        REQUIRE(rows.size() == 11);
        CHECK(rows.back()[0] == 2.0);
        for (const auto& r : rows) CHECK(std::abs(r[1] - r[2]) < 1e-7 * r[2]);
    }
    SUBCASE("sampled alpha") {
        run("ode", {{"alpha", {{"t", {0.0, 1.0, 2.0}}, {"values", {1.0, 0.0, -1.0}}}}, {"n_samples", 5}}, tmp.path);
        for (const auto& r : read_csv(tmp.path / "riccati_trajectory.csv")) CHECK(std::abs(r[1] - r[2]) < 1e-8);
        CHECK_THROWS_AS(run("ode", {{"alpha", {{"t", {1.0, 0.0}}, {"values", {1.0, 2.0}}}}}, tmp.path),
                        cli::UsageError);
    }
    SUBCASE("blow-up is a divergence") {
        CHECK_THROWS_AS(run("ode", {{"alpha", 0.0}, {"beta", 1.0}, {"k0", -1.0}}, tmp.path), Blowup);
    }
}

TEST_CASE("ensemble command") {
    TempDir tmp;
    const json cfg = {{"n_paths", 200}, {"t_max", 0.5}, {"sample_dt", 0.1}, {"sigma2", {0.05, 0.25}}};
    const auto res = run("ensemble", cfg, tmp.path / "a", 3);
    CHECK(res.files == std::vector<std::string>{"ensemble_sigma2_0.05.csv", "ensemble_sigma2_0.25.csv",
                                                "figure3.csv", "figure4.csv", "figure5.csv", "manifest.json"});
    std::string header;
    const auto rows = read_csv(tmp.path / "a" / "ensemble_sigma2_0.25.csv", &header);
    CHECK(header == "t,mean_k,mean_k2,se_k,se_k2,paper_formula,linearized_formula,survived");
    REQUIRE(rows.size() == 6);
    CHECK(rows.front()[2] == 1.0);
    CHECK(rows.back()[7] == 200.0);

    const auto fig4 = read_csv(tmp.path / "a" / "figure4.csv", &header);
    CHECK(header == "sigma2,t,mean_k2,se_k2,exact");
    for (const auto& r : fig4) CHECK(r[4] == doctest::Approx(std::exp(2 * r[0] * r[1])));

    run("ensemble", cfg, tmp.path / "b", 3);
    run("ensemble", cfg, tmp.path / "c", 4);
    CHECK(slurp(tmp.path / "a" / "figure3.csv") == slurp(tmp.path / "b" / "figure3.csv"));
    CHECK(slurp(tmp.path / "a" / "figure3.csv") != slurp(tmp.path / "c" / "figure3.csv"));

    CHECK_THROWS_WITH_AS(run("ensemble", {{"sample_dt", 0.0015}}, tmp.path), doctest::Contains("sample_dt"),
                         cli::UsageError);
    CHECK_THROWS_AS(run("ensemble", {{"convention", "ito-ish"}}, tmp.path), cli::UsageError);
}

TEST_CASE("pde command") {
    TempDir tmp;
    const json cfg = {{"N", 256}, {"T", 0.004}, {"snapshot_every", 100}, {"binary_snapshot", true}};
    const auto res = run("pde", cfg, tmp.path);
    CHECK(res.files == std::vector<std::string>{"pde_diagnostics.csv", "pde_snapshots.csv", "pde_final.kksnap",
                                                "pde_report.json", "manifest.json"});
    std::string header;
    const auto diag = read_csv(tmp.path / "pde_diagnostics.csv", &header);
    CHECK(header == "t,P,grad2,cubic_flux,mass,balance_residual");
    CHECK(diag.size() == 5);
    const auto snaps = read_csv(tmp.path / "pde_snapshots.csv", &header);
    CHECK(header == "t,x,u");
    CHECK(snaps.size() == 3 * 256);
    CHECK(slurp(tmp.path / "pde_final.kksnap").substr(0, 8) == "KK1SNAP1");
    const auto report = cli::load_config_file(tmp.path / "pde_report.json");
    CHECK(report["steps"] == 200);
    CHECK(report["ansatz_residual"]["relative_l2"].get<double>() > 1.0);

    SUBCASE("json tables") {
        cli::RunRequest r;
        r.command = "pde";
        r.config = cfg;
        r.out = (tmp.path / "j").string();
        r.format = "json";
        cli::run(r);
        const auto j = cli::load_config_file(tmp.path / "j" / "pde_diagnostics.json");
        CHECK(j["columns"] == json({"t", "P", "grad2", "cubic_flux", "mass", "balance_residual"}));
        CHECK(j["rows"].size() == 5);
        CHECK(j["rows"][4][0].get<double>() == diag[4][0]);
    }
    SUBCASE("divergence") {
        CHECK_THROWS_AS(run("pde", {{"N", 1024}, {"dt", 1e-3}, {"T", 0.5}}, tmp.path / "d"), DivergedState);
    }
    SUBCASE("T must be a multiple of dt") {
        CHECK_THROWS_AS(run("pde", {{"T", 0.10001}}, tmp.path / "e"), cli::UsageError);
    }
}

TEST_CASE("pii command") {
    TempDir tmp;
    run("pii", {{"steps", 400}}, tmp.path);
    std::string header;
    const auto rows = read_csv(tmp.path / "pii_solution.csv", &header);
    CHECK(header == "z,q,q_prime,residual");
    CHECK(rows.size() == 401);
    for (const auto& r : rows) CHECK(r[1] == doctest::Approx(-1.0 / r[0]).epsilon(1e-6));
    auto report = cli::load_config_file(tmp.path / "pii_report.json");
    CHECK(report["pole_encountered"] == false);

    run("pii", {{"q0", 1.0}, {"z_start", -1.0}, {"z_end", 1.0}, {"steps", 20000}}, tmp.path / "pole");
    report = cli::load_config_file(tmp.path / "pole" / "pii_report.json");
    CHECK(report["pole_encountered"] == true);
    CHECK(report["accepted"] == false);

    run("pii", {{"source", "momentum"}}, tmp.path / "m");
    report = cli::load_config_file(tmp.path / "m" / "pii_report.json");
    CHECK(report["delta"] == 0.5);
    CHECK(report["max_residual"].get<double>() < 1e-8);

    CHECK_THROWS_AS(run("pii", {{"source", "momentum"}, {"m", 0.0}}, tmp.path), cli::UsageError);
}

TEST_CASE("manifest") {
    TempDir tmp;
    const auto first = run("ode", {{"beta", 0.25}, {"n_samples", 7}}, tmp.path / "a", 11);
    const auto m = cli::load_config_file(tmp.path / "a" / "manifest.json");
    CHECK(m["artifact"] == "kklab");
    CHECK(m["version"] == KKLAB_VERSION);
    CHECK(m["command"] == "ode");
    CHECK(m["config"]["seed"] == 11);
    CHECK(m["config"]["beta"] == 0.25);
    CHECK(m["config"]["steps"] == 10000);

    cli::RunRequest replay;
    replay.command = "ode";
    replay.config = m;
    replay.out = (tmp.path / "b").string();
    cli::run(replay);
    CHECK(slurp(tmp.path / "a" / "riccati_trajectory.csv") == slurp(tmp.path / "b" / "riccati_trajectory.csv"));

    replay.command = "pii";
    CHECK_THROWS_AS(cli::run(replay), cli::UsageError);
}

TEST_CASE("flags override the config file") {
    cli::RunRequest r;
    r.command = "ensemble";
    r.config = {{"seed", 5}, {"format", "csv"}};
    r.seed = 9;
    r.format = "json";
    const auto c = cli::resolve_config(r);
    CHECK(c["seed"] == 9);
    CHECK(c["format"] == "json");
    CHECK(c["beta"] == 0.1);
}

TEST_CASE("executable exit codes") {
    TempDir tmp;
    std::ofstream(tmp.path / "bad.json") << "{\"beta\": -1}";
    std::ofstream(tmp.path / "diverge.json") << "{\"alpha\": 0, \"beta\": 1, \"k0\": -1}";
    std::ofstream(tmp.path / "broken.json") << "{not json";
    CHECK(shell("ode --out ok", tmp.path) == 0);
    CHECK(fs::exists(tmp.path / "ok" / "manifest.json"));
    CHECK(shell("", tmp.path) == 2);
    CHECK(shell("nonsense", tmp.path) == 2);
    CHECK(shell("ode --format xml", tmp.path) == 2);
    CHECK(shell("ode --config missing.json", tmp.path) == 2);
    CHECK(shell("ode --config broken.json", tmp.path) == 2);
    CHECK(shell("ode --config bad.json", tmp.path) == 2);
    CHECK(shell("ode --config diverge.json", tmp.path) == 3);
    CHECK(shell("ode --config ok/manifest.json --out again", tmp.path) == 0);
    CHECK(slurp(tmp.path / "ok" / "riccati_trajectory.csv") == slurp(tmp.path / "again" / "riccati_trajectory.csv"));
}
