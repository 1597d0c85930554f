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

#ifndef MLMAUDIT_EXPLAIN_EVAL_H_
#define MLMAUDIT_EXPLAIN_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmaudit/attribution.h"
#include "mlmaudit/explainers.h"
#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/outcome.h"

namespace mlmaudit {

// Spearman correlation of the magnitude rankings |a| and |b| (mid-ranks for
// ties). Flagged "ConstantVector" when either side is entirely tied.
Outcome SpearmanRho(std::span<const double> a, std::span<const double> b);

// |sigmoid(reconstructed intrinsic) - sigmoid(reconstructed explained)|.
double Pux(const Attribution& intrinsic, const Attribution& explained);

// Percentage of features whose sign disagrees with the intrinsic sign.
// |value| < 1e-12 is sign-neutral and never counts as a disagreement.
double Poifs(const Attribution& intrinsic, const Attribution& explained);

struct ProtocolSpec {
  std::size_t n_instances = 50;
  std::size_t n_repeats = 10;
  std::uint64_t seed = 0;
};

struct ExplainerSettings {
  std::size_t background_size = 100;
  LimeConfig lime;  // perturbation_scale and seed are filled per call
};

struct MeanStd {
  Outcome mean;
  double std = 0.0;  // population std of the repeat means
};

struct GroupExplainEval {
  std::string group;
  MeanStd rho_order;
  MeanStd pux;
  MeanStd poifs;
  std::size_t excluded = 0;         // per-instance KPI failures
  std::size_t invalid_repeats = 0;  // repeats with > 20% exclusions
  bool sampled_with_replacement = false;
};

struct ExplainEvalResult {
  AttributionMethod method = AttributionMethod::kIntrinsic;
  ProtocolSpec protocol;
  std::vector<GroupExplainEval> groups;
};

// Explains an instance with the given method. The LIME stream and the
// background sample are derived from (seed, instance_id) and (seed, group).
Attribution Explain(const MlmModel& model, const Dataset& train,
                    std::span<const double> x, int group,
                    AttributionMethod method, const ExplainerSettings& settings,
                    std::uint64_t seed, std::int64_t instance_id);

// For each group and repeat: draw n_instances training rows of the group,
// compare `method` against the intrinsic attribution, average per repeat,
// then report mean and std over repeats.
ExplainEvalResult EvaluateExplainer(const MlmModel& model, const Dataset& train,
                                    AttributionMethod method,
                                    const ProtocolSpec& protocol,
                                    const ExplainerSettings& settings);

struct InstanceComparison {
  std::string group;
  std::vector<std::string> feature_names;
  std::vector<double> instance;
  Attribution intrinsic;
  Attribution shap;
  Attribution lime;
  // Human-readable disagreement flags, e.g. "kernel_shap:sign:children".
  std::vector<std::string> flags;
};

InstanceComparison CompareInstance(const MlmModel& model, const Dataset& train,
                                   std::span<const double> x,
                                   std::string_view group,
                                   const ExplainerSettings& settings,
                                   std::uint64_t seed,
                                   std::int64_t instance_id = -1);

// 1-based rank of each |contribution|, largest first, ties mid-ranked.
std::vector<double> MagnitudeRanks(std::span<const double> contributions);

nlohmann::json ToJson(const InstanceComparison& comparison);
nlohmann::json ToJson(const ExplainEvalResult& result);

}  // namespace mlmaudit

#endif  // MLMAUDIT_EXPLAIN_EVAL_H_
