#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace entperc::experiment {

using Json = nlohmann::json;

inline constexpr std::string_view kToolName = "entperc";
inline constexpr std::string_view kToolVersion = "0.3.0";
inline constexpr const char* kOutputDirEnv = "ENTPERC_OUTPUT_DIR";

// Process exit status for each failure class.
enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kBudgetError = 3, kConvergenceError = 4 };

// Output directory used when the config does not name one: $ENTPERC_OUTPUT_DIR,
// else ./entperc-out.
std::filesystem::path default_output_dir();

// Validate a flat config object and materialize every default. Rejects
// unknown keys, wrong types and missing required keys with ConfigError.
Json resolve_config(const Json& raw);

// Parse a CLI override value: JSON when it parses, otherwise a string.
Json parse_override(std::string_view text);

// An in-memory CSV table; every cell is a real.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Run a resolved config and return its tables without touching the disk.
std::vector<Table> execute(const Json& resolved);

// Header plus rows, reals with 17 significant digits, '\n' line endings.
std::string to_csv(const Table& table);

std::string sha256_hex(std::string_view bytes);

struct RunSummary {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> outputs;
  std::size_t nonconverged = 0;
};

// Resolve, execute, write CSVs atomically, then the manifest
// <output_dir>/<name>.manifest.json. Outputs already written are removed
// if a later step fails.
RunSummary run(const Json& raw);

// Preset definition: {"preset", "caption", "full", "runs": [raw configs]}.
// `overrides` (master_seed, threads, output_dir, budget) apply to every run.
// Throws ConfigError for an unknown name.
Json preset(std::string_view name, bool full, const Json& overrides = Json::object());
std::vector<std::string> preset_names();

RunSummary run_preset(std::string_view name, bool full, const Json& overrides = Json::object());

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines;
};

// Check every recorded checksum. With rerun, also re-execute the recorded
// configs into a scratch directory and compare the regenerated CSVs.
VerifyReport verify_manifest(const std::filesystem::path& manifest, bool rerun);

// Single-line machine-readable error record for stderr.
std::string error_line(std::string_view kind, std::string_view message);

}  // namespace entperc::experiment
