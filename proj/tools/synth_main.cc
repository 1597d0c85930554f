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
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "synthetic_insurance.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic insurance-style CSV"};
  mlmaudit::synth::InsuranceOptions options;
  std::string out;
  app.add_option("--rows", options.rows, "Number of rows")->check(CLI::PositiveNumber);
  app.add_option("--seed", options.seed, "Generator seed");
  app.add_option("--out", out, "Output CSV (default: standard output)");
  CLI11_PARSE(app, argc, argv);

  if (out.empty()) {
    mlmaudit::synth::WriteInsuranceCsv(std::cout, options);
    return 0;
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write " << out << "\n";
    return 1;
  }
  mlmaudit::synth::WriteInsuranceCsv(file, options);
  return file ? 0 : 1;
}
