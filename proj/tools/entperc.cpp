#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "entperc/errors.hpp"
#include "entperc/experiment.hpp"

namespace ex = entperc::experiment;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::int64_t> threads;
  std::optional<std::string> output_dir;
  std::optional<double> budget;
  std::optional<std::string> name;
};

void add_overrides(CLI::App* app, Common& c, bool with_name) {
  app->add_option("--master-seed", c.master_seed, "Master seed for every random stream");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  app->add_option("--output-dir", c.output_dir, "Output directory (default $ENTPERC_OUTPUT_DIR or ./entperc-out)");
  app->add_option("--budget", c.budget, "Largest allowed number of node-evaluations");
  if (with_name) app->add_option("--name", c.name, "Stem of the output files");
}

void add_config(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_file, "JSON config file");
  app->add_option("-s,--set", c.sets, "Override one key: KEY=VALUE (VALUE parsed as JSON when possible)");
}

ex::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw entperc::ConfigError("cannot open config file " + path);
  ex::Json j = ex::Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw entperc::ConfigError("config file " + path + " is not valid JSON");
  if (!j.is_object()) throw entperc::ConfigError("config file " + path + " must hold a JSON object");
  return j;
}

ex::Json flag_overrides(const Common& c) {
  ex::Json j = ex::Json::object();
  if (c.master_seed) j["master_seed"] = *c.master_seed;
  if (c.threads) j["threads"] = *c.threads;
  if (c.output_dir) j["output_dir"] = *c.output_dir;
  if (c.budget) j["budget"] = *c.budget;
  if (c.name) j["name"] = *c.name;
  return j;
}

ex::Json build_config(const Common& c, const std::string& subcommand) {
  ex::Json j = c.config_file.empty() ? ex::Json::object() : read_json(c.config_file);
  if (!subcommand.empty()) {
    if (j.contains("subcommand") && j["subcommand"] != subcommand)
      throw entperc::ConfigError("config file is for subcommand " + j["subcommand"].dump() + ", not " + subcommand);
    j["subcommand"] = subcommand;
  }
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw entperc::ConfigError("--set expects KEY=VALUE, got " + s);
    j[s.substr(0, eq)] = ex::parse_override(std::string_view(s).substr(eq + 1));
  }
  j.update(flag_overrides(c));
  return j;
}

void report(const ex::RunSummary& s) {
  for (const auto& p : s.outputs) std::cout << p.string() << '\n';
  std::cout << s.manifest.string() << '\n';
  if (s.nonconverged > 0)
    std::cerr << ex::error_line("warning", std::to_string(s.nonconverged) +
                                               " mean-field points did not converge (converged = 0 in the CSV)")
              << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical entanglement percolation experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ex::kToolVersion));

  const std::vector<std::string> subcommands = {"simulate", "two-colour", "meanfield", "correlations", "analytic-p",
                                                "lattice-dump"};
  Common common;
  std::string chosen;
  for (const auto& name : subcommands) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment from a config and/or --set keys");
    add_config(sub, common);
    add_overrides(sub, common, true);
    sub->callback([&chosen, name] { chosen = name; });
  }

  auto* run_cmd = app.add_subcommand("run", "Run a config file whose \"subcommand\" key selects the experiment");
  add_config(run_cmd, common);
  add_overrides(run_cmd, common, true);
  run_cmd->callback([&chosen] { chosen = "run"; });

  std::string preset_name;
  bool full = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a named figure preset");
  preset_cmd->add_option("name", preset_name, "Preset name")->required();
  preset_cmd->add_flag("--full", full, "Full-scale lattice sizes and realization counts");
  add_overrides(preset_cmd, common, false);
  preset_cmd->callback([&chosen] { chosen = "preset"; });

  app.add_subcommand("presets", "List preset names")->callback([&chosen] { chosen = "presets"; });

  std::string manifest_path;
  bool rerun = false;
  auto* verify_cmd = app.add_subcommand("verify", "Check the checksums recorded in a manifest");
  verify_cmd->add_option("manifest", manifest_path, "Path to a .manifest.json")->required();
  verify_cmd->add_flag("--rerun", rerun, "Also regenerate every output and compare checksums");
  verify_cmd->callback([&chosen] { chosen = "verify"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << ex::error_line("config_error", e.what()) << '\n';
    return ex::kConfigError;
  }

  try {
    if (chosen == "presets") {
      for (const auto& n : ex::preset_names()) std::cout << n << '\n';
      return ex::kOk;
    }
    if (chosen == "verify") {
      const auto r = ex::verify_manifest(manifest_path, rerun);
      for (const auto& line : r.lines) std::cout << line << '\n';
      return r.ok ? ex::kOk : ex::kFailure;
    }
    if (chosen == "preset") {
      report(ex::run_preset(preset_name, full, flag_overrides(common)));
      return ex::kOk;
    }
    if (chosen == "run" && common.config_file.empty()) throw entperc::ConfigError("run needs --config");
    report(ex::run(build_config(common, chosen == "run" ? std::string() : chosen)));
    return ex::kOk;
  } catch (const entperc::ConfigError& e) {
    std::cerr << ex::error_line("config_error", e.what()) << '\n';
    return ex::kConfigError;
  } catch (const entperc::DomainError& e) {
    std::cerr << ex::error_line("config_error", e.what()) << '\n';
    return ex::kConfigError;
  } catch (const entperc::BudgetError& e) {
    std::cerr << ex::error_line("budget_exceeded", e.what()) << '\n';
    return ex::kBudgetError;
  } catch (const entperc::ConvergenceError& e) {
    std::cerr << ex::error_line("not_converged", e.what()) << '\n';
    return ex::kConvergenceError;
  } catch (const std::exception& e) {
    std::cerr << ex::error_line("failure", e.what()) << '\n';
    return ex::kFailure;
  }
}
