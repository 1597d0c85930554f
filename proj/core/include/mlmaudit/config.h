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

#ifndef MLMAUDIT_CONFIG_H_
#define MLMAUDIT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmaudit/audit.h"
#include "mlmaudit/explain_eval.h"
#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/stattests.h"

namespace mlmaudit {

// Named feature values, e.g. {"age": 35, "bmi": 40, "children": 3}.
using NamedInstance = std::vector<std::pair<std::string, double>>;

struct DiffIndExample {
  std::string group;
  NamedInstance a;
  NamedInstance b;
};

struct DiffIndMlmExample {
  NamedInstance instance;
  std::string group_a;
  std::string group_b;
};

struct ExplainInstance {
  std::string group;
  NamedInstance instance;
};

enum class OutputFormat { kJson, kMarkdown, kBoth };

// Everything one audit run needs. Built from a strict JSON document; unknown
// keys are rejected.
struct AuditConfig {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> model_path;
  ColumnRoles roles;
  SplitSpec split;
  // Split seed given explicitly in the config; otherwise derived from seed.
  bool split_seed_explicit = false;
  MlmSpec model_spec;
  FitOptions fit;
  double decision_threshold = 0.5;

  VifMode vif_mode = VifMode::kUncentered;
  ResidualKind residual_kind = ResidualKind::kPearson;
  BreuschPaganVariant bp_variant = BreuschPaganVariant::kClassic;
  std::size_t random_effect_min_groups = 8;

  bool weighted_accuracy = false;

  bool fairness_on_test = true;
  double similarity_delta = 0.25;
  std::vector<std::string> similarity_excluded;
  std::vector<DiffIndExample> diff_ind_examples;
  std::vector<DiffIndMlmExample> diff_ind_mlm_examples;

  ExplainerSettings explainers;
  std::size_t n_instances = 50;
  std::size_t n_repeats = 10;
  std::vector<ExplainInstance> explain_instances;

  RagBands bands = RagBands::Defaults();
  std::vector<Annotation> annotations;

  std::uint64_t seed = 0;
  std::filesystem::path output;
  OutputFormat format = OutputFormat::kBoth;

  // Normalized JSON form of this config (input to the config hash).
  nlohmann::json effective;
};

// The default configuration document, every key present.
nlohmann::json DefaultConfigJson();

// Relative paths resolve against `base_dir`. Throws kConfigError naming the
// offending key.
AuditConfig ParseConfig(const nlohmann::json& doc,
                        const std::filesystem::path& base_dir = {});
AuditConfig LoadConfig(const std::filesystem::path& path);

// Orders named values by `feature_names`; throws kInvalidArgument naming a
// missing or unknown feature.
std::vector<double> ResolveInstance(const NamedInstance& named,
                                    const std::vector<std::string>& feature_names);

// "age=35,bmi=40,children=3" -> NamedInstance. Throws kInvalidArgument.
NamedInstance ParseInstanceSpec(const std::string& text);

// Stream seeds derived from the master seed.
std::uint64_t SplitSeed(const AuditConfig& config);
std::uint64_t ProtocolSeed(const AuditConfig& config);
std::uint64_t ExplainSeed(const AuditConfig& config);

}  // namespace mlmaudit

#endif  // MLMAUDIT_CONFIG_H_
