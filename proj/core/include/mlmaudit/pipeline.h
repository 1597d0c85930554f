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

#ifndef MLMAUDIT_PIPELINE_H_
#define MLMAUDIT_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "mlmaudit/audit.h"
#include "mlmaudit/config.h"
#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"

namespace mlmaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRedGate = 3;

inline constexpr const char* kToolVersion = "0.1.0";

struct AuditRun {
  Dataset train;
  Dataset test;
  MlmModel model;
  AuditResults results;
  AuditReport report;
};

// ingest -> fit (or import) -> KPI modules -> report. Progress lines
// prefixed "[audit]" go to `progress`.
AuditRun RunAudit(const AuditConfig& config, std::ostream& progress);

// Loads, labels and splits the configured dataset.
TrainTestSplit PrepareData(const AuditConfig& config);

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;     // overrides output path (audit) / model path (fit)
  std::string format;  // "json" | "markdown" | "both"; empty = config
  bool fail_on_red = false;
  std::string instance;    // explain: "age=35,bmi=40,children=3"
  std::string group;       // explain
  std::string model_path;  // explain: import instead of fitting
};

// Each returns an exit code; errors are reported on `err`.
int CmdAudit(const CommandOptions& options, std::ostream& out,
             std::ostream& err);
int CmdFit(const CommandOptions& options, std::ostream& out, std::ostream& err);
int CmdExplain(const CommandOptions& options, std::ostream& out,
               std::ostream& err);

}  // namespace mlmaudit

#endif  // MLMAUDIT_PIPELINE_H_
