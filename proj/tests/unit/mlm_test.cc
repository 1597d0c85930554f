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

#include "mlmaudit/mlm.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <gtest/gtest.h>

#include "logistic_oracle.h"
#include "mlmaudit/error.h"
#include "test_util.h"

namespace mlmaudit {
namespace {

using testing::AllVarying;
using testing::LogitDesign;
using testing::SyntheticLogit;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const AuditError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no AuditError thrown";
  return ErrorCode::kIoError;
}

// Design rows [1, x...] of the given dataset rows.
oracle::Matrix DesignOf(const Dataset& ds, const std::vector<std::size_t>& rows) {
  oracle::Matrix x;
  for (std::size_t r : rows) {
    std::vector<double> row = {1.0};
    for (double v : ds.Row(r)) row.push_back(v);
    x.push_back(row);
  }
  return x;
}

std::vector<int> TargetOf(const Dataset& ds, const std::vector<std::size_t>& rows) {
  std::vector<int> y;
  for (std::size_t r : rows) y.push_back(ds.target[r]);
  return y;
}

std::vector<std::size_t> AllRows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.num_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return rows;
}

LogitDesign FourGroups() {
  LogitDesign d;
  d.alpha = {-1.0, 0.5, 0.0, 1.2};
  d.beta = {{0.8, -0.5}, {0.3, 0.2}, {1.1, -0.1}, {0.5, -0.6}};
  d.means = {1.0, 10.0};
  d.sds = {1.0, 3.0};
  d.rows_per_group = 250;
  return d;
}

TEST(FitTest, SingleGroupMatchesPlainLogistic) {
  LogitDesign d;
  d.alpha = {-0.4};
  d.beta = {{0.9, -0.3}};
  d.means = {0.0, 5.0};
  d.sds = {1.0, 2.0};
  d.rows_per_group = 400;
  const Dataset ds = SyntheticLogit(d, 1);

  MlmSpec spec;
  spec.varying_intercept = true;
  spec.fixed_slope_features = {"x0", "x1"};
  const MlmModel model = Fit(ds, spec);
  const std::vector<double> want =
      oracle::LogisticNewton(DesignOf(ds, AllRows(ds)), ds.target);
  EXPECT_NEAR(model.alpha[0], want[0], 1e-7);
  EXPECT_NEAR(model.beta_fixed[0], want[1], 1e-7);
  EXPECT_NEAR(model.beta_fixed[1], want[2], 1e-7);
  EXPECT_TRUE(model.fit_meta.converged);
}

TEST(FitTest, HugeVarianceGivesSeparateFits) {
  const Dataset ds = SyntheticLogit(FourGroups(), 2);
  FitOptions options;
  options.fixed_variance = 1e8;
  const MlmModel model = Fit(ds, AllVarying(2), options);
  for (int g = 0; g < 4; ++g) {
    const auto rows = ds.RowsInGroup(g);
    const std::vector<double> want =
        oracle::LogisticNewton(DesignOf(ds, rows), TargetOf(ds, rows));
    const auto gi = static_cast<std::size_t>(g);
    EXPECT_NEAR(model.alpha[gi], want[0], 1e-5) << "group " << g;
    EXPECT_NEAR(model.beta_varying[gi][0], want[1], 1e-5);
    EXPECT_NEAR(model.beta_varying[gi][1], want[2], 1e-5);
  }
}

TEST(FitTest, TinyVarianceGivesPooledFit) {
  const Dataset ds = SyntheticLogit(FourGroups(), 3);
  FitOptions options;
  options.fixed_variance = 1e-12;
  const MlmModel model = Fit(ds, AllVarying(2), options);
  const std::vector<double> want =
      oracle::LogisticNewton(DesignOf(ds, AllRows(ds)), ds.target);
  for (std::size_t g = 0; g < 4; ++g) {
    EXPECT_NEAR(model.alpha[g], want[0], 1e-4);
    EXPECT_NEAR(model.beta_varying[g][0], want[1], 1e-4);
    EXPECT_NEAR(model.beta_varying[g][1], want[2], 1e-5);
  }
}

TEST(FitTest, EstimatedVarianceShrinksTowardMean) {
  const Dataset ds = SyntheticLogit(FourGroups(), 4);
  const MlmModel model = Fit(ds, AllVarying(2));
  EXPECT_TRUE(model.fit_meta.converged);
  FitOptions loose;
  loose.fixed_variance = 1e8;
  const MlmModel separate = Fit(ds, AllVarying(2), loose);

  double mean_alpha = 0.0;
  for (double a : model.alpha) mean_alpha += a;
  mean_alpha /= 4.0;
  EXPECT_NEAR(model.mu_alpha, mean_alpha, 1e-9);
  double spread = 0.0;
  double spread_separate = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    spread += std::pow(model.alpha[g] - mean_alpha, 2);
    spread_separate += std::pow(separate.alpha[g] - separate.mu_alpha, 2);
  }
  EXPECT_NEAR(model.sigma2_alpha, spread / 4.0, 1e-6);
  EXPECT_LT(spread, spread_separate);
  EXPECT_GT(model.sigma2_alpha, 0.0);
  ASSERT_EQ(model.sigma2_beta.size(), 2u);
}

TEST(FitTest, LaplaceEmKeepsVarianceAboveFloor) {
  const Dataset ds = SyntheticLogit(FourGroups(), 4);
  FitOptions em;
  em.variance_update = VarianceUpdate::kLaplaceEm;
  const MlmModel model = Fit(ds, AllVarying(2), em);
  EXPECT_TRUE(model.fit_meta.converged);
  FitOptions loose;
  loose.fixed_variance = 1e8;
  const MlmModel separate = Fit(ds, AllVarying(2), loose);

  EXPECT_GT(model.sigma2_alpha, 1e-3);
  double spread = 0.0;
  double spread_separate = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    spread += std::pow(model.alpha[g] - model.mu_alpha, 2);
    spread_separate += std::pow(separate.alpha[g] - separate.mu_alpha, 2);
  }
  EXPECT_LT(spread, spread_separate);
  EXPECT_GT(spread, 0.1 * spread_separate);
  EXPECT_GT(model.sigma2_alpha, spread / 4.0);
}

TEST(FitTest, VarianceUpdateNames) {
  EXPECT_EQ(FitOptions{}.variance_update, VarianceUpdate::kModeDeviation);
  for (VarianceUpdate u : {VarianceUpdate::kModeDeviation, VarianceUpdate::kLaplaceEm}) {
    EXPECT_EQ(ParseVarianceUpdate(VarianceUpdateName(u)), u);
  }
  EXPECT_EQ(CodeOf([] { ParseVarianceUpdate("reml"); }),
            ErrorCode::kInvalidArgument);
}

TEST(FitTest, FixedSlopesAreShared) {
  const TrainTestSplit split = testing::SyntheticInsuranceSplit(5);
  const MlmModel model = Fit(split.train, testing::InsuranceSpec());
  ASSERT_EQ(model.groups.size(), 4u);
  for (int g = 1; g < 4; ++g) {
    EXPECT_EQ(model.Slopes(g)[2], model.Slopes(0)[2]);
  }
  EXPECT_EQ(model.varying_features, (std::vector<int>{0, 1}));
  EXPECT_EQ(model.fixed_features, (std::vector<int>{2}));
}

TEST(FitTest, DegenerateGroup) {
  Dataset ds = SyntheticLogit(FourGroups(), 6);
  for (std::size_t r : ds.RowsInGroup(2)) ds.target[r] = 0;
  EXPECT_EQ(CodeOf([&] { Fit(ds, AllVarying(2)); }), ErrorCode::kDegenerateGroup);
}

TEST(FitTest, SeparationDetected) {
  LogitDesign d;
  d.alpha = {0.0};
  d.beta = {{1.0}};
  d.means = {0.0};
  d.sds = {1.0};
  d.rows_per_group = 60;
  Dataset ds = SyntheticLogit(d, 7);
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    ds.target[r] = ds.features(static_cast<Eigen::Index>(r), 0) > 0.0 ? 1 : 0;
  }
  MlmSpec spec;
  spec.fixed_slope_features = {"x0"};
  EXPECT_EQ(CodeOf([&] { Fit(ds, spec); }), ErrorCode::kSeparationDetected);
}

TEST(FitTest, RejectsBadSpec) {
  const Dataset ds = SyntheticLogit(FourGroups(), 8);
  MlmSpec spec;
  spec.varying_slope_features = {"x0"};
  EXPECT_EQ(CodeOf([&] { Fit(ds, spec); }), ErrorCode::kInvalidArgument);
  spec.fixed_slope_features = {"x1", "nope"};
  EXPECT_EQ(CodeOf([&] { Fit(ds, spec); }), ErrorCode::kInvalidArgument);
  spec.fixed_slope_features = {"x0", "x1"};
  EXPECT_EQ(CodeOf([&] { Fit(ds, spec); }), ErrorCode::kInvalidArgument);
}

class FittedModelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    split_ = testing::SyntheticInsuranceSplit(9);
    model_ = Fit(split_.train, testing::InsuranceSpec());
  }
  TrainTestSplit split_;
  MlmModel model_;
};

TEST_F(FittedModelTest, JsonRoundTrip) {
  const nlohmann::json doc = ModelToJson(model_);
  const MlmModel back = ModelFromJson(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(back, model_);
  EXPECT_EQ(PredictProba(back, split_.test), PredictProba(model_, split_.test));
}

TEST_F(FittedModelTest, JsonRejectsWrongVersion) {
  nlohmann::json doc = ModelToJson(model_);
  doc["version"] = 99;
  EXPECT_EQ(CodeOf([&] { ModelFromJson(doc); }), ErrorCode::kConfigError);
  doc = ModelToJson(model_);
  doc.erase("alpha");
  EXPECT_EQ(CodeOf([&] { ModelFromJson(doc); }), ErrorCode::kConfigError);
}

TEST_F(FittedModelTest, ThresholdBoundaryIsPositive) {
  const std::vector<double> x = {40.0, 30.0, 1.0};
  const double p = PredictProba(model_, x, "southeast");
  EXPECT_EQ(PredictClass(model_, x, "southeast", p), 1);
  EXPECT_EQ(PredictClass(model_, x, "southeast", std::nextafter(p, 1.0)), 0);
  EXPECT_EQ(CodeOf([&] { PredictClass(model_, x, "southeast", 0.0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { PredictClass(model_, x, "southeast", 1.0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { PredictProba(model_, x, "atlantis"); }),
            ErrorCode::kUnknownGroup);
}

TEST_F(FittedModelTest, IntrinsicAttributionIsAdditive) {
  const std::vector<double> center = {39.0, 30.5, 1.1};
  for (std::size_t r = 0; r < split_.test.num_rows(); ++r) {
    const std::vector<double> x = split_.test.Row(r);
    const std::string& group =
        split_.test.groups[static_cast<std::size_t>(split_.test.group_of_row[r])];
    const double eta = LogOdds(model_, x, group);
    const Attribution plain = IntrinsicAttribution(model_, x, group);
    EXPECT_EQ(plain.method, AttributionMethod::kIntrinsic);
    EXPECT_NEAR(plain.Reconstructed(), eta, 1e-12 * (1.0 + std::abs(eta)));
    const Attribution centered = IntrinsicAttribution(model_, x, group, center);
    EXPECT_NEAR(centered.Reconstructed(), eta, 1e-10);
    const std::vector<double> slopes = model_.Slopes(model_.GroupIndex(group));
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(plain.contributions[k], slopes[k] * x[k]);
      EXPECT_NEAR(centered.contributions[k], slopes[k] * (x[k] - center[k]), 1e-12);
    }
  }
}

TEST_F(FittedModelTest, ResidualKinds) {
  const std::vector<double> p = PredictProba(model_, split_.train);
  const Residuals response = ComputeResiduals(model_, split_.train, ResidualKind::kResponse);
  const Residuals pearson = ComputeResiduals(model_, split_.train, ResidualKind::kPearson);
  const Residuals deviance = ComputeResiduals(model_, split_.train, ResidualKind::kDeviance);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double y = split_.train.target[i];
    const double pi = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
    EXPECT_NEAR(response.values[i], y - pi, 1e-12);
    EXPECT_NEAR(pearson.values[i], (y - pi) / std::sqrt(pi * (1.0 - pi)), 1e-9);
    const double d = std::sqrt(-2.0 * (y * std::log(pi) + (1.0 - y) * std::log(1.0 - pi)));
    EXPECT_NEAR(deviance.values[i], y > 0.5 ? d : -d, 1e-9);
  }
  EXPECT_EQ(ParseResidualKind(ResidualKindName(ResidualKind::kDeviance)),
            ResidualKind::kDeviance);
  EXPECT_EQ(CodeOf([] { ParseResidualKind("studentized"); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace mlmaudit
