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
#include <functional>
#include <limits>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mlmaudit/config.h"
#include "mlmaudit/error.h"
#include "mlmaudit/pipeline.h"

namespace mlmaudit {
namespace {

using ::testing::HasSubstr;

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const AuditError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no AuditError thrown";
  return ErrorCode::kIoError;
}

TEST(ScoreKpiTest, TableEdges) {
  const RagBands b = RagBands::Defaults();
  EXPECT_EQ(ScoreKpi("AUC", 0.91, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("AUC", 0.8, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("AUC", 0.79, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("AUC", 0.5, b), Rag::kRed);
  EXPECT_EQ(ScoreKpi("VIF", 7.5, b), Rag::kRed);
  EXPECT_EQ(ScoreKpi("VIF", 5.0, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("VIF", 1.8, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("SWT", 0.05, b), Rag::kRed);
  EXPECT_EQ(ScoreKpi("SWT", 0.1, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("BPT", 0.2, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("SP", 0.2, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("SP", 0.3, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("SP", 0.1999, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("DI", 0.8, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("DI", 0.7, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("DI", 0.69, b), Rag::kRed);
  EXPECT_EQ(ScoreKpi("rho_order_SHAP", 0.6, b), Rag::kAmber);
  EXPECT_EQ(ScoreKpi("POIFS_LIME", 33.3, b), Rag::kRed);
  EXPECT_EQ(ScoreKpi("PUX_SHAP", 0.0, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("VIF", kInf, b), Rag::kRed);
}

TEST(ScoreKpiTest, Errors) {
  const RagBands b = RagBands::Defaults();
  EXPECT_EQ(CodeOf([&] { ScoreKpi("Bogus", 1.0, b); }), ErrorCode::kUnknownKpi);
  EXPECT_EQ(CodeOf([&] { ScoreKpi("AUC", std::nan(""), b); }),
            ErrorCode::kNonFiniteValue);
}

TEST(RagBandsTest, DefaultsTileAndAreMonotone) {
  const RagBands b = RagBands::Defaults();
  const std::vector<std::string> worse_up = {"VIF", "SP", "EqualOdds", "Diff_Ind",
                                             "Diff_Ind_MLM", "PUX", "POIFS"};
  const std::vector<std::string> better_up = {"AUC", "F1", "DI", "rho_order", "SWT", "BPT"};
  auto rank = [](Rag r) { return r == Rag::kGreen ? 0 : r == Rag::kAmber ? 1 : 2; };
  for (const std::string& kpi : b.Kpis()) {
    EXPECT_NO_THROW(ValidateBands(b.Get(kpi))) << kpi;
    int previous = -1;
    bool up = std::find(worse_up.begin(), worse_up.end(), kpi) != worse_up.end();
    ASSERT_TRUE(up || std::find(better_up.begin(), better_up.end(), kpi) != better_up.end())
        << kpi;
    for (double v = -1.0; v <= 120.0; v += 0.005) {
      const int r = rank(ScoreKpi(kpi, v, b));
      const int badness = up ? r : -r;
      if (previous != -1 && v > -1.0) EXPECT_GE(badness, previous) << kpi << " " << v;
      previous = badness;
    }
  }
}

TEST(RagBandsTest, OverridesAndValidation) {
  RagBands b = RagBands::Defaults();
  b.ApplyOverrides(nlohmann::json::parse(R"({"SP": [
      {"score": "green", "lower": null, "upper": 0.1, "upper_inclusive": true},
      {"score": "amber", "lower": 0.1, "lower_inclusive": false, "upper": 0.15},
      {"score": "red", "lower": 0.15, "lower_inclusive": true, "upper": null}]})"));
  EXPECT_EQ(ScoreKpi("SP", 0.1, b), Rag::kGreen);
  EXPECT_EQ(ScoreKpi("SP", 0.15, b), Rag::kRed);

  const std::vector<Band> gap = {{-kInf, true, 1.0, false, Rag::kGreen},
                                 {2.0, true, kInf, true, Rag::kRed}};
  EXPECT_EQ(CodeOf([&] { ValidateBands(gap); }), ErrorCode::kInvalidArgument);
  const std::vector<Band> overlap = {{-kInf, true, 1.0, true, Rag::kGreen},
                                     {1.0, true, kInf, true, Rag::kRed}};
  EXPECT_EQ(CodeOf([&] { ValidateBands(overlap); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(KpiFamily("rho_order_LIME"), "rho_order");
  EXPECT_EQ(KpiFamily("SWT_random_effects"), "SWT");
  EXPECT_EQ(KpiFamily("AUC"), "AUC");
}

TEST(AssembleReportTest, TotalOnEmptyResults) {
  AuditResults empty;
  const AuditReport report =
      AssembleReport(empty, RagBands::Defaults(), {}, MlmModel{}, nlohmann::json::object());
  std::size_t entries = 0;
  for (const auto* section :
       {&report.statistical_properties, &report.accuracy, &report.group_fairness,
        &report.individual_fairness, &report.explainability}) {
    for (const KpiEntry& e : *section) {
      ++entries;
      EXPECT_TRUE(e.rag.has_value() || !e.flags.empty()) << e.name;
    }
  }
  EXPECT_GT(entries, 0u);
  ASSERT_FALSE(report.annotations.empty());
  EXPECT_EQ(report.annotations[0].key, kModelAssumptionsAnnotation);
  EXPECT_THAT(RenderMarkdown(report), HasSubstr("not assessed"));
  EXPECT_EQ(ReportFromJson(ToJson(report)), report);
}

class RealReportTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    nlohmann::json doc = DefaultConfigJson();
    doc["dataset"] = std::string(MLMAUDIT_TEST_DATA_DIR) + "/synthetic_insurance.csv";
    doc["protocol"]["n_instances"] = 8;
    doc["protocol"]["n_repeats"] = 2;
    doc["explainers"]["lime"]["n_samples"] = 400;
    doc["explain_instances"] = nlohmann::json::parse(
        R"([{"group": "northwest", "instance": {"age": 35, "bmi": 40, "children": 3}}])");
    std::ostringstream progress;
    run_ = new AuditRun(RunAudit(ParseConfig(doc), progress));
  }
  static void TearDownTestSuite() { delete run_; }
  static AuditRun* run_;
};

AuditRun* RealReportTest::run_ = nullptr;

TEST_F(RealReportTest, EveryKpiOnceWithScoreOrFlag) {
  const AuditReport& r = run_->report;
  const std::vector<std::string> expected = {
      "VIF", "SWT", "BPT", "SWT_random_effects", "AUC", "F1", "SP", "DI", "EqualOdds",
      "Diff_Ind", "Diff_Ind_MLM", "rho_order_SHAP", "PUX_SHAP", "POIFS_SHAP",
      "rho_order_LIME", "PUX_LIME", "POIFS_LIME"};
  std::vector<std::string> names;
  OverallCounts counts;
  for (const auto* section : {&r.statistical_properties, &r.accuracy, &r.group_fairness,
                              &r.individual_fairness, &r.explainability}) {
    for (const KpiEntry& e : *section) {
      names.push_back(e.name);
      EXPECT_TRUE(e.rag.has_value() || !e.flags.empty()) << e.name;
      if (!e.rag) {
        ++counts.not_scored;
      } else if (*e.rag == Rag::kRed) {
        ++counts.red;
      } else if (*e.rag == Rag::kAmber) {
        ++counts.amber;
      } else {
        ++counts.green;
      }
      if (e.rag && e.value) EXPECT_EQ(ScoreKpi(e.name, *e.value, RagBands::Defaults()), *e.rag);
    }
  }
  for (const Annotation& a : r.annotations) {
    if (!a.rag) ++counts.not_scored;
  }
  EXPECT_EQ(names, expected);
  EXPECT_EQ(counts, r.overall);
}

TEST_F(RealReportTest, JsonRoundTripAndSchema) {
  const AuditReport& r = run_->report;
  const nlohmann::json doc = nlohmann::json::parse(RenderJson(r));
  for (const char* key : {"metadata", "model", "statistical_properties", "accuracy",
                          "group_fairness", "individual_fairness", "explainability",
                          "annotations", "overall"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  for (const auto& entry : doc.at("accuracy")) {
    for (const char* key : {"name", "value", "per_group", "rag", "flags"}) {
      EXPECT_TRUE(entry.contains(key)) << key;
    }
  }
  EXPECT_EQ(ReportFromJson(doc), r);
  EXPECT_EQ(doc.at("model").at("instance_comparisons").size(), 1u);
}

TEST_F(RealReportTest, MarkdownHasOneRowPerKpi) {
  const std::string md = RenderMarkdown(run_->report);
  for (const KpiEntry* e : {run_->report.Find("VIF"), run_->report.Find("AUC"),
                            run_->report.Find("DI"), run_->report.Find("POIFS_LIME")}) {
    ASSERT_NE(e, nullptr);
    EXPECT_THAT(md, HasSubstr("| " + e->name + " |"));
  }
  EXPECT_THAT(md, HasSubstr("● RED"));
  EXPECT_THAT(md, HasSubstr("● GREEN"));
  const KpiEntry* vif = run_->report.Find("VIF");
  ASSERT_TRUE(vif->rag.has_value());
  std::istringstream lines(md);
  std::string line;
  bool seen = false;
  while (std::getline(lines, line)) {
    if (line.rfind("| VIF |", 0) == 0) {
      seen = true;
      EXPECT_THAT(line, HasSubstr(*vif->rag == Rag::kRed ? "RED" : *vif->rag == Rag::kAmber ? "AMBER" : "GREEN"));
    }
  }
  EXPECT_TRUE(seen);
}

}  // namespace
}  // namespace mlmaudit
