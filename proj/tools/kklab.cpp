// kklab <soliton|audit|ode|ensemble|pde|pii> [--config FILE] [--seed N] [--out DIR] [--format csv|json]
//
// Exit codes: 0 success, 1 I/O or unexpected error, 2 usage error,
// 3 numerical divergence.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "kklab/runner.hpp"

int main(int argc, char** argv) {
    namespace cli = kklab::cli;

    CLI::App app{"kklab: perturbed Kaup-Kupershmidt soliton laboratory"};
    app.set_version_flag("--version", std::string(KKLAB_VERSION));

    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;

    app.add_option("command", command, "Subcommand")
        ->required()
        ->check(CLI::IsMember(cli::commands()));
    app.add_option("--config", config_path, "JSON config file, or a manifest.json from an earlier run")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Random seed (overrides the config)");
    app.add_option("--out", out, "Output directory (overrides the config)");
    app.add_option("--format", format, "Tabular output format (overrides the config)")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::exit_usage;
    }

    cli::RunRequest request;
    request.command = command;
    request.seed = seed;
    request.out = out;
    request.format = format;
    if (!config_path.empty()) {
        try {
            request.config = cli::load_config_file(config_path);
        } catch (const cli::UsageError& e) {
            std::cerr << "kklab: usage error: " << e.what() << '\n';
            return cli::exit_usage;
        }
    }
    return cli::run_and_report(request, std::cout, std::cerr);
}
