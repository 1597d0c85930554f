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

#include "mlmaudit/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mlmaudit/error.h"

namespace mlmaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Band MakeBand(double lower, bool lower_inclusive, double upper,
              bool upper_inclusive, Rag score) {
  return Band{lower, lower_inclusive, upper, upper_inclusive, score};
}

// Larger is worse: green below `green_upper`, red above `red_lower`.
std::vector<Band> Ascending(double green_upper, bool green_upper_inclusive,
                            double red_lower, bool red_lower_inclusive) {
  return {MakeBand(-kInf, true, green_upper, green_upper_inclusive, Rag::kGreen),
          MakeBand(green_upper, !green_upper_inclusive, red_lower,
                   !red_lower_inclusive, Rag::kAmber),
          MakeBand(red_lower, red_lower_inclusive, kInf, true, Rag::kRed)};
}

// Larger is better: red up to `red_upper`, green from `green_lower`.
std::vector<Band> Descending(double red_upper, bool red_upper_inclusive,
                             double green_lower, bool green_lower_inclusive) {
  return {MakeBand(-kInf, true, red_upper, red_upper_inclusive, Rag::kRed),
          MakeBand(red_upper, !red_upper_inclusive, green_lower,
                   !green_lower_inclusive, Rag::kAmber),
          MakeBand(green_lower, green_lower_inclusive, kInf, true, Rag::kGreen)};
}

nlohmann::json EdgeJson(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double EdgeFromJson(const nlohmann::json& v, double infinite) {
  if (v.is_null()) return infinite;
  return v.get<double>();
}

nlohmann::json OutcomeValue(const Outcome& o) {
  if (o.ok() && std::isfinite(*o.value)) return *o.value;
  return nullptr;
}

void AddFlag(std::vector<std::string>& flags, std::string flag) {
  if (flag.empty()) return;
  if (std::find(flags.begin(), flags.end(), flag) == flags.end()) {
    flags.push_back(std::move(flag));
  }
}

// Scores and stores a value; non-finite values are kept out of `value`.
void SetScored(KpiEntry& entry, std::optional<double> value,
               const RagBands& bands) {
  if (!value) return;
  if (std::isnan(*value)) {
    AddFlag(entry.flags, "NonFiniteValue");
    return;
  }
  entry.rag = ScoreKpi(entry.name, *value, bands);
  if (std::isinf(*value)) {
    AddFlag(entry.flags, *value > 0 ? "value:+inf" : "value:-inf");
  } else {
    entry.value = *value;
  }
}

int Severity(Rag rag) {
  switch (rag) {
    case Rag::kRed: return 2;
    case Rag::kAmber: return 1;
    case Rag::kGreen: return 0;
  }
  return 2;
}

KpiEntry TestEntry(const std::string& name, const TestResult& t,
                   const RagBands& bands) {
  KpiEntry e;
  e.name = name;
  e.per_group = nullptr;
  SetScored(e, t.p_value, bands);
  e.details = {{"statistic", t.statistic},
               {"p_value", t.p_value},
               {"sample_size", t.sample_size}};
  if (!t.notes.empty()) e.details["notes"] = t.notes;
  return e;
}

std::vector<KpiEntry> StatisticalSection(const AuditResults& r,
                                         const RagBands& bands) {
  std::vector<KpiEntry> out;
  {
    KpiEntry e;
    e.name = "VIF";
    e.per_group = nullptr;
    nlohmann::json per_feature = nlohmann::json::object();
    double worst = -kInf;
    for (std::size_t k = 0; k < r.vif.values.size(); ++k) {
      per_feature[r.feature_names[k]] = EdgeJson(r.vif.values[k]);
      if (r.vif.perfect_collinearity[k]) {
        AddFlag(e.flags, "PerfectCollinearity:" + r.feature_names[k]);
      }
      worst = std::max(worst, r.vif.values[k]);
    }
    if (!r.vif.values.empty()) SetScored(e, worst, bands);
    e.details = {{"per_feature", per_feature},
                 {"mode", r.vif_mode},
                 {"headline", "max over features"},
                 {"note",
                  "the green band (VIF < 1) is unreachable because VIF >= 1; "
                  "amber is the best attainable score"}};
    out.push_back(std::move(e));
  }
  {
    KpiEntry e = TestEntry("SWT", r.swt, bands);
    e.details["residuals"] = r.residual_kind;
    out.push_back(std::move(e));
  }
  {
    KpiEntry e = TestEntry("BPT", r.bpt, bands);
    e.details["residuals"] = r.residual_kind;
    e.details["degrees_of_freedom"] = r.feature_names.size();
    out.push_back(std::move(e));
  }
  {
    KpiEntry e;
    e.name = "SWT_random_effects";
    e.per_group = nullptr;
    e.details = {{"num_groups", r.random_effects.num_groups}};
    if (r.random_effects.insufficient_groups) {
      AddFlag(e.flags, "InsufficientGroups");
    } else {
      nlohmann::json effects = nlohmann::json::object();
      std::optional<double> worst;
      for (const auto& [name, t] : r.random_effects.effects) {
        if (!t.notes.empty()) {
          effects[name] = {{"flag", t.notes}};
          AddFlag(e.flags, name + ":" + t.notes);
          continue;
        }
        effects[name] = {{"statistic", t.statistic}, {"p_value", t.p_value}};
        worst = worst ? std::min(*worst, t.p_value) : t.p_value;
      }
      e.details["effects"] = effects;
      e.details["headline"] = "min p-value over effects";
      SetScored(e, worst, bands);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<KpiEntry> AccuracySection(const AuditResults& r,
                                      const RagBands& bands) {
  std::vector<KpiEntry> out;
  for (const char* name : {"AUC", "F1"}) {
    const bool auc = std::string_view(name) == "AUC";
    KpiEntry e;
    e.name = name;
    e.per_group = nlohmann::json::object();
    nlohmann::json rows = nlohmann::json::object();
    for (const GroupAccuracy& g : r.accuracy.per_group) {
      const Outcome& o = auc ? g.auc : g.f1;
      e.per_group[g.group] = OutcomeValue(o);
      rows[g.group] = g.rows;
      if (!o.flag.empty()) AddFlag(e.flags, g.group + ":" + o.flag);
    }
    const Outcome& macro = auc ? r.accuracy.macro_auc : r.accuracy.macro_f1;
    AddFlag(e.flags, macro.flag);
    SetScored(e, macro.value, bands);
    e.details = {{"average", "mean over groups with a defined value"},
                 {"test_rows", rows}};
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<KpiEntry> GroupFairnessSection(const AuditResults& r,
                                           const RagBands& bands) {
  const GroupFairnessReport& f = r.group_fairness;
  std::vector<KpiEntry> out;
  auto pooled = [&](const char* name, const Outcome& headline,
                    Outcome GroupFairnessBreakdown::*member) {
    KpiEntry e;
    e.name = name;
    e.per_group = nlohmann::json::object();
    for (const GroupFairnessBreakdown& g : f.per_group) {
      const Outcome& o = g.*member;
      e.per_group[g.group] = OutcomeValue(o);
      if (!o.flag.empty()) AddFlag(e.flags, g.group + ":" + o.flag);
    }
    AddFlag(e.flags, headline.flag);
    SetScored(e, headline.value, bands);
    e.details = {{"headline", "all evaluated rows"}};
    out.push_back(std::move(e));
  };
  pooled("SP", f.sp, &GroupFairnessBreakdown::sp);
  pooled("DI", f.di, &GroupFairnessBreakdown::di);

  KpiEntry e;
  e.name = "EqualOdds";
  e.per_group = nlohmann::json::object();
  std::optional<double> worst_value;
  std::optional<Rag> worst_rag;
  for (const GroupFairnessBreakdown& g : f.per_group) {
    e.per_group[g.group] = {{"diff_fpr", OutcomeValue(g.diff_fpr)},
                            {"diff_tpr", OutcomeValue(g.diff_tpr)},
                            {"equal_odds", OutcomeValue(g.equal_odds)}};
    if (!g.equal_odds.ok()) {
      AddFlag(e.flags, g.group + ":" + g.equal_odds.flag);
      continue;
    }
    const double v = *g.equal_odds.value;
    const Rag rag = ScoreKpi("EqualOdds", v, bands);
    if (!worst_rag || Severity(rag) > Severity(*worst_rag) ||
        (Severity(rag) == Severity(*worst_rag) && v > *worst_value)) {
      worst_rag = rag;
      worst_value = v;
    }
  }
  if (worst_value) {
    SetScored(e, worst_value, bands);
  } else {
    AddFlag(e.flags, "NoDefinedGroups");
  }
  e.details = {{"headline", "worst per-group score"},
               {"pooled", OutcomeValue(f.equal_odds)}};
  if (!f.equal_odds.flag.empty()) e.details["pooled_flag"] = f.equal_odds.flag;
  out.push_back(std::move(e));
  return out;
}

std::vector<KpiEntry> IndividualFairnessSection(const AuditResults& r,
                                                const RagBands& bands) {
  std::vector<KpiEntry> out;
  {
    KpiEntry e;
    e.name = "Diff_Ind";
    e.per_group = nlohmann::json::object();
    nlohmann::json pairs = nlohmann::json::object();
    nlohmann::json means = nlohmann::json::object();
    std::optional<double> worst;
    for (const SimilarPairScan& s : r.similar_pairs) {
      e.per_group[s.group] = OutcomeValue(s.max_diff);
      pairs[s.group] = s.pair_count;
      means[s.group] = OutcomeValue(s.mean_diff);
      if (s.max_diff.ok()) {
        worst = worst ? std::max(*worst, *s.max_diff.value) : *s.max_diff.value;
      } else {
        AddFlag(e.flags, s.group + ":" + s.max_diff.flag);
      }
    }
    if (worst) {
      SetScored(e, worst, bands);
    } else {
      AddFlag(e.flags, "NoSimilarPairs");
    }
    e.details = {{"headline", "max over similar within-group pairs"},
                 {"delta", r.similarity_delta},
                 {"pair_count", pairs},
                 {"mean_diff", means},
                 {"examples", r.diff_ind_examples}};
    out.push_back(std::move(e));
  }
  {
    KpiEntry e;
    e.name = "Diff_Ind_MLM";
    e.per_group = nlohmann::json::object();
    nlohmann::json means = nlohmann::json::object();
    std::optional<double> worst;
    for (const InterGroupScan& s : r.inter_group) {
      const std::string key = s.group_a + "|" + s.group_b;
      e.per_group[key] = s.max_diff;
      means[key] = s.mean_diff;
      worst = worst ? std::max(*worst, s.max_diff) : s.max_diff;
    }
    if (worst) {
      SetScored(e, worst, bands);
    } else {
      AddFlag(e.flags, "SingleGroup");
    }
    e.details = {{"headline", "max over evaluated rows and group pairs"},
                 {"mean_diff", means},
                 {"examples", r.diff_ind_mlm_examples}};
    out.push_back(std::move(e));
  }
  return out;
}

void AddExplainEntries(const ExplainEvalResult& eval, const std::string& suffix,
                       const RagBands& bands, std::vector<KpiEntry>& out) {
  struct Item {
    const char* family;
    MeanStd GroupExplainEval::*member;
  };
  for (const Item& item : {Item{"rho_order", &GroupExplainEval::rho_order},
                           Item{"PUX", &GroupExplainEval::pux},
                           Item{"POIFS", &GroupExplainEval::poifs}}) {
    KpiEntry e;
    e.name = std::string(item.family) + "_" + suffix;
    e.per_group = nlohmann::json::object();
    double sum = 0.0;
    std::size_t n = 0;
    nlohmann::json excluded = nlohmann::json::object();
    for (const GroupExplainEval& g : eval.groups) {
      const MeanStd& ms = g.*item.member;
      e.per_group[g.group] = {{"mean", OutcomeValue(ms.mean)}, {"std", ms.std}};
      excluded[g.group] = {{"excluded", g.excluded},
                           {"invalid_repeats", g.invalid_repeats}};
      if (g.sampled_with_replacement) {
        AddFlag(e.flags, g.group + ":SampledWithReplacement");
      }
      if (ms.mean.ok()) {
        sum += *ms.mean.value;
        ++n;
      } else {
        AddFlag(e.flags, g.group + ":" + ms.mean.flag);
      }
    }
    if (n > 0) {
      SetScored(e, sum / static_cast<double>(n), bands);
    } else {
      AddFlag(e.flags, "NoDefinedGroups");
    }
    e.details = {{"headline", "mean over groups of the repeat-averaged means"},
                 {"method", MethodName(eval.method)},
                 {"n_instances", eval.protocol.n_instances},
                 {"n_repeats", eval.protocol.n_repeats},
                 {"exclusions", excluded}};
    out.push_back(std::move(e));
  }
}

nlohmann::json EntryJson(const KpiEntry& e) {
  return {{"name", e.name},
          {"value", e.value ? nlohmann::json(*e.value) : nlohmann::json(nullptr)},
          {"per_group", e.per_group},
          {"rag", e.rag ? nlohmann::json(RagName(*e.rag)) : nlohmann::json(nullptr)},
          {"flags", e.flags},
          {"details", e.details}};
}

KpiEntry EntryFromJson(const nlohmann::json& j) {
  KpiEntry e;
  e.name = j.at("name").get<std::string>();
  if (!j.at("value").is_null()) e.value = j.at("value").get<double>();
  e.per_group = j.at("per_group");
  if (!j.at("rag").is_null()) e.rag = ParseRag(j.at("rag").get<std::string>());
  e.flags = j.at("flags").get<std::vector<std::string>>();
  e.details = j.contains("details") ? j.at("details") : nlohmann::json();
  return e;
}

std::string FormatValue(const KpiEntry& e) {
  if (!e.value) {
    for (const std::string& f : e.flags) {
      if (f == "value:+inf") return "+inf";
      if (f == "value:-inf") return "-inf";
    }
    return "n/a";
  }
  std::ostringstream os;
  os.precision(4);
  os << *e.value;
  return os.str();
}

std::string RagCell(const std::optional<Rag>& rag) {
  if (!rag) return "not scored";
  switch (*rag) {
    case Rag::kRed: return "● RED";
    case Rag::kAmber: return "● AMBER";
    case Rag::kGreen: return "● GREEN";
  }
  return "not scored";
}

void RenderTable(std::ostringstream& os, const std::string& title,
                 const std::vector<KpiEntry>& entries) {
  os << "### " << title << "\n\n";
  os << "| KPI | Value | RAG | Flags |\n|---|---|---|---|\n";
  for (const KpiEntry& e : entries) {
    std::string flags;
    for (const std::string& f : e.flags) {
      if (!flags.empty()) flags += ", ";
      flags += f;
    }
    os << "| " << e.name << " | " << FormatValue(e) << " | " << RagCell(e.rag)
       << " | " << flags << " |\n";
  }
  os << "\n";
}

}  // namespace

std::string_view RagName(Rag rag) {
  switch (rag) {
    case Rag::kRed: return "red";
    case Rag::kAmber: return "amber";
    case Rag::kGreen: return "green";
  }
  return "red";
}

Rag ParseRag(std::string_view name) {
  if (name == "red") return Rag::kRed;
  if (name == "amber") return Rag::kAmber;
  if (name == "green") return Rag::kGreen;
  throw AuditError(ErrorCode::kInvalidArgument,
                   "unknown RAG score '" + std::string(name) + "'");
}

bool Band::Contains(double value) const {
  const bool above = value > lower || (value == lower && (lower_inclusive || std::isinf(lower)));
  const bool below = value < upper || (value == upper && (upper_inclusive || std::isinf(upper)));
  return above && below;
}

RagBands RagBands::Defaults() {
  RagBands b;
  // VIF keeps green below 1 even though VIF >= 1 always.
  b.Set("VIF", Ascending(1.0, false, 5.0, false));
  b.Set("SWT", Descending(0.05, true, 0.1, false));
  b.Set("BPT", Descending(0.05, true, 0.1, false));
  b.Set("AUC", Descending(0.5, true, 0.8, true));
  b.Set("F1", Descending(0.5, true, 0.8, true));
  b.Set("SP", Ascending(0.2, false, 0.3, false));
  b.Set("DI", Descending(0.7, false, 0.8, true));
  b.Set("EqualOdds", Ascending(0.1, false, 0.2, false));
  b.Set("Diff_Ind", Ascending(0.2, false, 0.3, false));
  b.Set("Diff_Ind_MLM", Ascending(0.2, false, 0.3, false));
  b.Set("rho_order", Descending(0.3, true, 0.8, true));
  b.Set("PUX", Ascending(0.1, false, 0.2, false));
  b.Set("POIFS", Ascending(10.0, true, 20.0, false));
  return b;
}

void RagBands::Set(const std::string& kpi, std::vector<Band> bands) {
  ValidateBands(bands);
  bands_[kpi] = std::move(bands);
}

const std::vector<Band>& RagBands::Get(std::string_view kpi) const {
  const auto it = bands_.find(kpi);
  if (it == bands_.end()) {
    throw AuditError(ErrorCode::kUnknownKpi,
                     "no RAG bands for KPI '" + std::string(kpi) + "'");
  }
  return it->second;
}

bool RagBands::Has(std::string_view kpi) const {
  return bands_.find(kpi) != bands_.end();
}

std::vector<std::string> RagBands::Kpis() const {
  std::vector<std::string> out;
  for (const auto& [name, bands] : bands_) out.push_back(name);
  return out;
}

void RagBands::ApplyOverrides(const nlohmann::json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) {
    throw AuditError(ErrorCode::kConfigError, "rag_bands must be an object");
  }
  for (const auto& [kpi, list] : overrides.items()) {
    if (!Has(kpi)) {
      throw AuditError(ErrorCode::kUnknownKpi,
                       "rag_bands: unknown KPI '" + kpi + "'");
    }
    if (!list.is_array()) {
      throw AuditError(ErrorCode::kConfigError,
                       "rag_bands." + kpi + " must be an array of bands");
    }
    std::vector<Band> bands;
    for (const auto& item : list) {
      static const std::vector<std::string> kKeys = {
          "score", "lower", "lower_inclusive", "upper", "upper_inclusive"};
      for (const auto& [key, value] : item.items()) {
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
          throw AuditError(ErrorCode::kConfigError,
                           "rag_bands." + kpi + ": unknown key '" + key + "'");
        }
      }
      try {
        Band band;
        band.score = ParseRag(item.at("score").get<std::string>());
        band.lower = EdgeFromJson(item.value("lower", nlohmann::json()), -kInf);
        band.upper = EdgeFromJson(item.value("upper", nlohmann::json()), kInf);
        band.lower_inclusive = item.value("lower_inclusive", true);
        band.upper_inclusive = item.value("upper_inclusive", false);
        bands.push_back(band);
      } catch (const nlohmann::json::exception& e) {
        throw AuditError(ErrorCode::kConfigError,
                         "rag_bands." + kpi + ": " + e.what());
      }
    }
    try {
      Set(kpi, std::move(bands));
    } catch (const AuditError& e) {
      throw AuditError(ErrorCode::kConfigError,
                       "rag_bands." + kpi + ": " + e.what());
    }
  }
}

nlohmann::json RagBands::ToJson() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [kpi, bands] : bands_) {
    nlohmann::json list = nlohmann::json::array();
    for (const Band& b : bands) {
      list.push_back({{"score", RagName(b.score)},
                      {"lower", EdgeJson(b.lower)},
                      {"lower_inclusive", b.lower_inclusive},
                      {"upper", EdgeJson(b.upper)},
                      {"upper_inclusive", b.upper_inclusive}});
    }
    out[kpi] = list;
  }
  return out;
}

void ValidateBands(const std::vector<Band>& bands) {
  if (bands.empty()) {
    throw AuditError(ErrorCode::kInvalidArgument, "band list is empty");
  }
  if (bands.front().lower != -kInf || bands.back().upper != kInf) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "bands must start at -inf and end at +inf");
  }
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const Band& b = bands[i];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
        (b.lower == b.upper && !(b.lower_inclusive && b.upper_inclusive))) {
      throw AuditError(ErrorCode::kInvalidArgument, "band " + std::to_string(i) +
                                                        " is empty or inverted");
    }
    if (i + 1 < bands.size()) {
      const Band& next = bands[i + 1];
      if (b.upper != next.lower) {
        throw AuditError(ErrorCode::kInvalidArgument,
                         "bands " + std::to_string(i) + " and " +
                             std::to_string(i + 1) + " leave a gap or overlap");
      }
      if (b.upper_inclusive == next.lower_inclusive) {
        throw AuditError(ErrorCode::kInvalidArgument,
                         "edge " + std::to_string(b.upper) +
                             " must belong to exactly one band");
      }
    }
  }
}

std::string KpiFamily(std::string_view name) {
  static const char* kFamilies[] = {"Diff_Ind_MLM", "Diff_Ind", "rho_order",
                                    "EqualOdds",    "VIF",      "SWT",
                                    "BPT",          "AUC",      "F1",
                                    "SP",           "DI",       "PUX",
                                    "POIFS"};
  for (const char* family : kFamilies) {
    const std::string_view f(family);
    if (name == f ||
        (name.size() > f.size() && name.substr(0, f.size()) == f &&
         name[f.size()] == '_')) {
      return std::string(f);
    }
  }
  return std::string(name);
}

Rag ScoreKpi(std::string_view name, double value, const RagBands& bands) {
  const std::string family = KpiFamily(name);
  if (!bands.Has(family)) {
    throw AuditError(ErrorCode::kUnknownKpi,
                     "no RAG bands for KPI '" + std::string(name) + "'");
  }
  if (std::isnan(value)) {
    throw AuditError(ErrorCode::kNonFiniteValue,
                     "KPI '" + std::string(name) + "' is NaN");
  }
  for (const Band& band : bands.Get(family)) {
    if (band.Contains(value)) return band.score;
  }
  throw AuditError(ErrorCode::kInvalidArgument, "bands do not cover the value");
}

const KpiEntry* AuditReport::Find(std::string_view name) const {
  for (const auto* section : {&statistical_properties, &accuracy, &group_fairness,
                              &individual_fairness, &explainability}) {
    for (const KpiEntry& e : *section) {
      if (e.name == name) return &e;
    }
  }
  return nullptr;
}

AuditReport AssembleReport(const AuditResults& results, const RagBands& bands,
                           const std::vector<Annotation>& annotations,
                           const MlmModel& model, nlohmann::json metadata) {
  AuditReport report;
  report.metadata = std::move(metadata);
  report.metadata["rag_bands"] = bands.ToJson();
  report.model = ModelToJson(model);
  report.model["instance_comparisons"] = results.instance_comparisons;

  report.statistical_properties = StatisticalSection(results, bands);
  report.accuracy = AccuracySection(results, bands);
  report.group_fairness = GroupFairnessSection(results, bands);
  report.individual_fairness = IndividualFairnessSection(results, bands);
  if (results.shap_eval) {
    AddExplainEntries(*results.shap_eval, "SHAP", bands, report.explainability);
  }
  if (results.lime_eval) {
    AddExplainEntries(*results.lime_eval, "LIME", bands, report.explainability);
  }

  report.annotations = annotations;
  const bool has_assumptions =
      std::any_of(annotations.begin(), annotations.end(), [](const Annotation& a) {
        return a.key == kModelAssumptionsAnnotation;
      });
  if (!has_assumptions) {
    report.annotations.insert(report.annotations.begin(),
                              Annotation{kModelAssumptionsAnnotation, "", {}});
  }

  auto count = [&](const std::optional<Rag>& rag) {
    if (!rag) {
      ++report.overall.not_scored;
      return;
    }
    switch (*rag) {
      case Rag::kRed: ++report.overall.red; break;
      case Rag::kAmber: ++report.overall.amber; break;
      case Rag::kGreen: ++report.overall.green; break;
    }
  };
  for (auto* section :
       {&report.statistical_properties, &report.accuracy, &report.group_fairness,
        &report.individual_fairness, &report.explainability}) {
    for (KpiEntry& e : *section) {
      if (!e.rag && e.flags.empty()) AddFlag(e.flags, "NotComputed");
      count(e.rag);
    }
  }
  for (const Annotation& a : report.annotations) count(a.rag);
  return report;
}

nlohmann::json ToJson(const AuditReport& report) {
  auto section = [](const std::vector<KpiEntry>& entries) {
    nlohmann::json out = nlohmann::json::array();
    for (const KpiEntry& e : entries) out.push_back(EntryJson(e));
    return out;
  };
  nlohmann::json annotations = nlohmann::json::array();
  for (const Annotation& a : report.annotations) {
    annotations.push_back(
        {{"key", a.key},
         {"text", a.text.empty() ? "not assessed" : a.text},
         {"assessed", !a.text.empty()},
         {"rag", a.rag ? nlohmann::json(RagName(*a.rag)) : nlohmann::json(nullptr)}});
  }
  return {{"metadata", report.metadata},
          {"model", report.model},
          {"statistical_properties", section(report.statistical_properties)},
          {"accuracy", section(report.accuracy)},
          {"group_fairness", section(report.group_fairness)},
          {"individual_fairness", section(report.individual_fairness)},
          {"explainability", section(report.explainability)},
          {"annotations", annotations},
          {"overall",
           {{"red", report.overall.red},
            {"amber", report.overall.amber},
            {"green", report.overall.green},
            {"not_scored", report.overall.not_scored}}}};
}

AuditReport ReportFromJson(const nlohmann::json& doc) {
  try {
    AuditReport report;
    report.metadata = doc.at("metadata");
    report.model = doc.at("model");
    auto section = [&](const char* key) {
      std::vector<KpiEntry> out;
      for (const auto& e : doc.at(key)) out.push_back(EntryFromJson(e));
      return out;
    };
    report.statistical_properties = section("statistical_properties");
    report.accuracy = section("accuracy");
    report.group_fairness = section("group_fairness");
    report.individual_fairness = section("individual_fairness");
    report.explainability = section("explainability");
    for (const auto& a : doc.at("annotations")) {
      Annotation ann;
      ann.key = a.at("key").get<std::string>();
      if (a.at("assessed").get<bool>()) ann.text = a.at("text").get<std::string>();
      if (!a.at("rag").is_null()) ann.rag = ParseRag(a.at("rag").get<std::string>());
      report.annotations.push_back(std::move(ann));
    }
    const auto& o = doc.at("overall");
    report.overall.red = o.at("red").get<std::size_t>();
    report.overall.amber = o.at("amber").get<std::size_t>();
    report.overall.green = o.at("green").get<std::size_t>();
    report.overall.not_scored = o.at("not_scored").get<std::size_t>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kConfigError,
                     std::string("malformed report document: ") + e.what());
  }
}

nlohmann::json ReportBody(const AuditReport& report) {
  nlohmann::json body = ToJson(report);
  body["metadata"].erase("timestamp");
  return body;
}

std::string RenderJson(const AuditReport& report) {
  return ToJson(report).dump(2) + "\n";
}

std::string RenderMarkdown(const AuditReport& report) {
  std::ostringstream os;
  os << "# Model audit report\n\n";
  const nlohmann::json& m = report.metadata;
  auto meta = [&](const char* key) -> std::string {
    if (!m.contains(key)) return "";
    return m.at(key).is_string() ? m.at(key).get<std::string>() : m.at(key).dump();
  };
  os << "- Tool version: " << meta("tool_version") << "\n";
  os << "- Seed: " << meta("seed") << "\n";
  os << "- Dataset SHA-256: " << meta("dataset_sha256") << "\n";
  os << "- Config SHA-256: " << meta("config_sha256") << "\n";
  if (m.contains("timestamp")) os << "- Generated: " << meta("timestamp") << "\n";
  os << "- Overall: " << report.overall.red << " red, " << report.overall.amber
     << " amber, " << report.overall.green << " green, "
     << report.overall.not_scored << " not scored\n\n";

  os << "## Model\n\n";
  RenderTable(os, "Statistical properties", report.statistical_properties);
  RenderTable(os, "Accuracy of predictions", report.accuracy);
  os << "Note: the VIF green band (< 1.0) cannot be reached because VIF >= 1; "
        "amber is the best attainable VIF score.\n\n";

  os << "## Discrimination\n\n";
  RenderTable(os, "Group fairness", report.group_fairness);
  RenderTable(os, "Individual fairness", report.individual_fairness);

  os << "## Transparency & explainability\n\n";
  RenderTable(os, "Explainability accuracy", report.explainability);
  os << "### Annotations\n\n| Item | Assessment | RAG |\n|---|---|---|\n";
  for (const Annotation& a : report.annotations) {
    os << "| " << a.key << " | " << (a.text.empty() ? "not assessed" : a.text)
       << " | " << RagCell(a.rag) << " |\n";
  }
  os << "\n";
  return os.str();
}

}  // namespace mlmaudit
