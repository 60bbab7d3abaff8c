#pragma once

// Command-line front end: subcommands, config layering, run artifacts.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "metagrav/config.hpp"

namespace metagrav::app {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

/// Everything a single run needs once the command line is parsed.
struct RunRequest {
    std::string command;
    KeyValueConfig config; // file values with flag overrides applied
    std::filesystem::path out_dir;
};

/// Outcome of one run; `summary` is what ends up in summary.json.
struct RunResult {
    int exit_code = exit_ok;
    std::string error;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

/// FNV-1a 64-bit hash of the canonical config text, as 16 hex digits.
std::string config_hash(const KeyValueConfig& cfg);

/// Runs one subcommand and writes summary.json, manifest.json and any
/// series files into req.out_dir. The manifest is written on failure too.
RunResult execute(const RunRequest& req, std::ostream& log);

/// Full CLI entry point: parses args (without the program name) and runs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace metagrav::app
