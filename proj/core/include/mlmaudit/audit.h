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

#ifndef MLMAUDIT_AUDIT_H_
#define MLMAUDIT_AUDIT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmaudit/accuracy.h"
#include "mlmaudit/explain_eval.h"
#include "mlmaudit/fairness.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/stattests.h"

namespace mlmaudit {

enum class Rag { kRed, kAmber, kGreen };

std::string_view RagName(Rag rag);  // "red" / "amber" / "green"
Rag ParseRag(std::string_view name);

// One interval of the real line with its score. Infinite ends are always
// treated as included so that +/-inf can be scored.
struct Band {
  double lower = 0.0;
  bool lower_inclusive = true;
  double upper = 0.0;
  bool upper_inclusive = false;
  Rag score = Rag::kRed;

  bool Contains(double value) const;
  bool operator==(const Band&) const = default;
};

// Bands per KPI family ("VIF", "SWT", ..., "rho_order", "PUX", "POIFS").
// Each family's bands must tile (-inf, +inf) in increasing order, every
// shared edge belonging to exactly one side.
class RagBands {
 public:
  static RagBands Defaults();

  void Set(const std::string& kpi, std::vector<Band> bands);
  const std::vector<Band>& Get(std::string_view kpi) const;
  bool Has(std::string_view kpi) const;
  std::vector<std::string> Kpis() const;

  // Overrides from JSON: {"SP": [{"score": "green", "lower": null,
  // "upper": 0.2, "upper_inclusive": false}, ...]}. null = infinite end.
  void ApplyOverrides(const nlohmann::json& overrides);
  nlohmann::json ToJson() const;

 private:
  std::map<std::string, std::vector<Band>, std::less<>> bands_;
};

// Throws kInvalidArgument when bands leave gaps or overlap.
void ValidateBands(const std::vector<Band>& bands);

// KPI family of a report name: "rho_order_SHAP" -> "rho_order".
std::string KpiFamily(std::string_view name);

// Throws kUnknownKpi or kNonFiniteValue (NaN).
Rag ScoreKpi(std::string_view name, double value, const RagBands& bands);

struct KpiEntry {
  std::string name;
  std::optional<double> value;
  nlohmann::json per_group;  // object keyed by group, or null
  std::optional<Rag> rag;    // absent => flagged non-result
  std::vector<std::string> flags;
  nlohmann::json details;

  bool operator==(const KpiEntry&) const = default;
};

struct Annotation {
  std::string key;
  std::string text;  // empty => "not assessed"
  std::optional<Rag> rag;

  bool operator==(const Annotation&) const = default;
};

struct OverallCounts {
  std::size_t red = 0;
  std::size_t amber = 0;
  std::size_t green = 0;
  std::size_t not_scored = 0;

  bool operator==(const OverallCounts&) const = default;
};

struct AuditReport {
  nlohmann::json metadata;
  nlohmann::json model;
  std::vector<KpiEntry> statistical_properties;
  std::vector<KpiEntry> accuracy;
  std::vector<KpiEntry> group_fairness;
  std::vector<KpiEntry> individual_fairness;
  std::vector<KpiEntry> explainability;
  std::vector<Annotation> annotations;
  OverallCounts overall;

  const KpiEntry* Find(std::string_view name) const;
  bool operator==(const AuditReport&) const = default;
};

// Typed outputs of every KPI module for one audit run.
struct AuditResults {
  std::vector<std::string> feature_names;
  std::vector<std::string> groups;
  VifResult vif;
  std::string vif_mode;
  TestResult swt;
  TestResult bpt;
  std::string residual_kind;
  RandomEffectNormality random_effects;
  AccuracyReport accuracy;
  GroupFairnessReport group_fairness;
  std::vector<SimilarPairScan> similar_pairs;
  std::vector<InterGroupScan> inter_group;
  // Explicitly requested example comparisons; copied into details.
  nlohmann::json diff_ind_examples = nlohmann::json::array();
  nlohmann::json diff_ind_mlm_examples = nlohmann::json::array();
  double similarity_delta = 0.25;
  std::optional<ExplainEvalResult> shap_eval;
  std::optional<ExplainEvalResult> lime_eval;
  nlohmann::json instance_comparisons = nlohmann::json::array();
};

inline constexpr const char* kModelAssumptionsAnnotation =
    "model_assumptions_documentation";

// Builds the report; total (never throws for flagged inputs).
AuditReport AssembleReport(const AuditResults& results, const RagBands& bands,
                           const std::vector<Annotation>& annotations,
                           const MlmModel& model, nlohmann::json metadata);

nlohmann::json ToJson(const AuditReport& report);
AuditReport ReportFromJson(const nlohmann::json& doc);

// The report without metadata.timestamp, for determinism checks.
nlohmann::json ReportBody(const AuditReport& report);

std::string RenderJson(const AuditReport& report);
std::string RenderMarkdown(const AuditReport& report);

}  // namespace mlmaudit

#endif  // MLMAUDIT_AUDIT_H_
