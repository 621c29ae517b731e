#pragma once

// Experiment runner behind the hpm command-line tool: JSON configs, schema
// checks, dispatch to the library and report files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpm/poly.hpp"

namespace hpm::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kSchemaError = 2, kRuntimeError = 3 };

const std::vector<std::string>& commands();

struct Invocation {
  std::string command;      // may be empty when the config names it
  std::string config_path;  // empty: defaults only
  std::string out_dir;      // empty: config "output", else "."
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

struct ExperimentConfig {
  std::string command;
  std::optional<Poly> polynomial;
  int dim = 3;
  int rule_level = 24;
  std::optional<std::vector<double>> radii;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output;
  nlohmann::json section;  // per-command options, {} when absent
};

/// Every schema problem found in `j`, as human-readable lines; empty when valid.
std::vector<std::string> validate(const nlohmann::json& j);

/// Validates and resolves a config; `base` is the directory relative file
/// references are taken from. Throws ConfigError with the diagnostics.
ExperimentConfig load_config(const nlohmann::json& j, const Invocation& inv, const std::filesystem::path& base);

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> d);
  std::vector<std::string> diagnostics;
};

/// Runs one experiment and writes its reports. `log` receives a short summary,
/// `err` any diagnostics.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

/// argv front end (CLI11).
int main_entry(int argc, char** argv);

}  // namespace hpm::cli
