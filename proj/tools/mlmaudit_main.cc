/*
 * Copyright 2026 The mlmaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mlmaudit/config.h"
#include "mlmaudit/pipeline.h"

namespace {

void AddCommon(CLI::App* cmd, mlmaudit::CommandOptions& options,
               std::optional<std::uint64_t>& seed) {
  cmd->add_option("--config", options.config_path, "Audit configuration (JSON)")
      ->required();
  cmd->add_option("--seed", seed, "Master seed; overrides the config");
  cmd->add_option("--out", options.out, "Output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel logistic model audit"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "Print the default configuration and exit");
  app.set_version_flag("--version", mlmaudit::kToolVersion);

  mlmaudit::CommandOptions options;
  std::optional<std::uint64_t> seed;

  CLI::App* audit = app.add_subcommand("audit", "Run the full audit");
  AddCommon(audit, options, seed);
  audit->add_option("--format", options.format, "json, markdown or both")
      ->check(CLI::IsMember({"json", "markdown", "both"}));
  audit->add_flag("--fail-on-red", options.fail_on_red,
                  "Exit with 3 when any KPI scores red");

  CLI::App* fit = app.add_subcommand("fit", "Fit and export the model");
  AddCommon(fit, options, seed);

  CLI::App* explain =
      app.add_subcommand("explain", "Compare explanations of one instance");
  AddCommon(explain, options, seed);
  explain->add_option("--instance", options.instance,
                      "Feature values, e.g. age=35,bmi=40,children=3")
      ->required();
  explain->add_option("--group", options.group, "Model group")->required();
  explain->add_option("--model", options.model_path,
                      "Exported model to use instead of fitting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mlmaudit::kExitOk : mlmaudit::kExitError;
  }

  if (print_defaults) {
    std::cout << mlmaudit::DefaultConfigJson().dump(2) << "\n";
    return mlmaudit::kExitOk;
  }
  options.seed = seed;
  if (audit->parsed()) return mlmaudit::CmdAudit(options, std::cout, std::cerr);
  if (fit->parsed()) return mlmaudit::CmdFit(options, std::cout, std::cerr);
  if (explain->parsed()) return mlmaudit::CmdExplain(options, std::cout, std::cerr);
  std::cerr << app.help();
  return mlmaudit::kExitError;
}
