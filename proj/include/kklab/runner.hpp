#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kklab/errors.hpp"

namespace kklab::cli {

/// Process exit codes.
inline constexpr int exit_success = 0;
inline constexpr int exit_failure = 1;    // I/O and other unexpected errors
inline constexpr int exit_usage = 2;      // bad arguments or configuration
inline constexpr int exit_divergence = 3; // numerical divergence / blow-up

/// Bad command line or configuration; the message names the offending key.
class UsageError : public Error {
public:
    using Error::Error;
};

const std::vector<std::string>& commands();

/// Every key a command accepts, with its default value.
nlohmann::json default_config(const std::string& command);

struct RunRequest {
    std::string command;
    /// Contents of --config: either a plain config object or a manifest
    /// written by a previous run.
    nlohmann::json config = nlohmann::json::object();
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

/// Defaults, overlaid by the config file, overlaid by the flags.
nlohmann::json resolve_config(const RunRequest& request);

/// Parses a JSON config file; throws UsageError when missing or malformed.
nlohmann::json load_config_file(const std::filesystem::path& path);

struct RunResult {
    std::filesystem::path out_dir;
    std::vector<std::string> files;  // data files, manifest last
    nlohmann::json manifest;
};

/// Runs a subcommand and writes its artifacts plus manifest.json.
RunResult run(const RunRequest& request);

/// run() with exceptions mapped onto the exit codes above.
int run_and_report(const RunRequest& request, std::ostream& out, std::ostream& err);

}  // namespace kklab::cli
