// Copyright 2026 The varq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// varq run <config> [--output-dir D] [--seed-override N]
// varq validate <config>
// varq references <dir>
//
// Exit codes: 0 success, 1 validation failure, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "varq/experiment.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int report_config_error(const varq::ConfigError& e) {
  for (const std::string& msg : e.errors()) std::cerr << "error: " << msg << '\n';
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varq: variational quantum algorithm experiments"};
  app.set_version_flag("--version", varq::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed_override;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--output-dir", output_dir, "output directory (overrides VARQ_OUTPUT_DIR and the config)");
  run->add_option("--seed-override", seed_override, "replace the config seed");

  CLI::App* validate = app.add_subcommand("validate", "validate a config and print its canonical form");
  validate->add_option("config", config_path, "config file")->required();

  std::string ref_dir;
  CLI::App* refs = app.add_subcommand("references", "write analytic reference tables");
  refs->add_option("output_dir", ref_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) {
      const varq::ExperimentConfig c = varq::validate_config(config_path);
      std::cout << varq::echo_config(c);
      return 0;
    }
    if (*refs) {
      for (const std::string& p : varq::emit_reference_tables(ref_dir)) std::cout << p << '\n';
      return 0;
    }
    varq::ExperimentConfig c = varq::validate_config(config_path);
    if (seed_override) c.seed = *seed_override;
    const std::string dir = varq::resolve_output_dir(output_dir, c);
    const varq::RunReport rep = varq::run_experiment(c, dir);
    std::cout << "config " << rep.config_hash << '\n';
    for (const std::string& a : rep.artifacts) std::cout << dir << '/' << a << '\n';
    std::cout << "wall_seconds " << rep.wall_seconds << '\n';
    if (!rep.ok) {
      std::cerr << "error: " << rep.error << '\n';
      return kExitRuntime;
    }
    return 0;
  } catch (const varq::ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
