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

#ifndef MLMAUDIT_MLM_H_
#define MLMAUDIT_MLM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmaudit/attribution.h"
#include "mlmaudit/ingest.h"

namespace mlmaudit {

// Which coefficients vary per group. Every feature is either varying or
// fixed (shared across groups).
struct MlmSpec {
  bool varying_intercept = true;
  std::vector<std::string> varying_slope_features;
  std::vector<std::string> fixed_slope_features;

  void Validate(std::span<const std::string> feature_names) const;
};

// How variance components are re-estimated between outer iterations.
//   kModeDeviation: mean squared deviation of the group coefficients at the
//     mode (collapses to the floor when groups differ little).
//   kLaplaceEm: (deviation + posterior variance) / (J - 1), using the inverse
//     negative Hessian at the mode.
enum class VarianceUpdate { kModeDeviation, kLaplaceEm };
std::string_view VarianceUpdateName(VarianceUpdate update);
VarianceUpdate ParseVarianceUpdate(std::string_view name);

struct FitOptions {
  // Relative change of the penalized log-likelihood between outer
  // iterations that counts as converged.
  double tolerance = 1e-8;
  int max_iterations = 200;
  int max_newton_steps = 50;
  // Any training linear predictor beyond this magnitude is treated as
  // divergence caused by (quasi-)complete separation.
  double separation_bound = 50.0;
  double variance_floor = 1e-8;
  // When set, every variance component is held at this value (raw feature
  // units) instead of being re-estimated. Used to force complete pooling
  // (tiny) or no pooling (huge).
  std::optional<double> fixed_variance;
  VarianceUpdate variance_update = VarianceUpdate::kModeDeviation;
};

struct FitMeta {
  int iterations = 0;
  bool converged = false;
  double penalized_log_likelihood = 0.0;

  bool operator==(const FitMeta&) const = default;
};

// Logistic multilevel model:
//   logit P(y = 1) = alpha[g] + sum_k beta[g or shared]_k * x_k
// Varying coefficients are drawn from N(mu, sigma2) across groups.
struct MlmModel {
  std::vector<std::string> feature_names;
  std::vector<std::string> groups;
  bool varying_intercept = true;
  std::vector<int> varying_features;  // indices into feature_names
  std::vector<int> fixed_features;

  std::vector<double> alpha;                      // [group]
  std::vector<std::vector<double>> beta_varying;  // [group][varying k]
  std::vector<double> beta_fixed;                 // [fixed k]

  double mu_alpha = 0.0;
  double sigma2_alpha = 0.0;
  std::vector<double> mu_beta;      // [varying k]
  std::vector<double> sigma2_beta;  // [varying k]

  FitMeta fit_meta;

  std::size_t num_features() const { return feature_names.size(); }
  // Throws kUnknownGroup.
  int GroupIndex(std::string_view label) const;
  // Full slope vector (one per feature) of a group.
  std::vector<double> Slopes(int group) const;
  double LogOdds(std::span<const double> x, int group) const;

  bool operator==(const MlmModel&) const = default;
};

MlmModel Fit(const Dataset& train, const MlmSpec& spec,
             const FitOptions& options = {});

double LogOdds(const MlmModel& model, std::span<const double> x,
               std::string_view group);
double PredictProba(const MlmModel& model, std::span<const double> x,
                    std::string_view group);
// 1 iff PredictProba >= threshold (the boundary maps to the positive class).
int PredictClass(const MlmModel& model, std::span<const double> x,
                 std::string_view group, double threshold = 0.5);

// Probabilities / classes for every row of a dataset, using each row's group.
std::vector<double> PredictProba(const MlmModel& model, const Dataset& ds);
std::vector<int> PredictClass(const MlmModel& model, const Dataset& ds,
                              double threshold = 0.5);

enum class ResidualKind { kResponse, kPearson, kDeviance };
std::string_view ResidualKindName(ResidualKind kind);
ResidualKind ParseResidualKind(std::string_view name);

struct Residuals {
  ResidualKind kind = ResidualKind::kPearson;
  std::vector<double> values;
  // Rows whose fitted probability was clamped into [1e-12, 1 - 1e-12].
  std::size_t clamped = 0;
};

Residuals ComputeResiduals(const MlmModel& model, const Dataset& train,
                           ResidualKind kind);

// base = alpha[g], contribution_k = beta_k * x_k. With `center` the
// contributions become beta_k * (x_k - center_k) and the base absorbs the
// shift, so additivity still holds.
Attribution IntrinsicAttribution(const MlmModel& model,
                                 std::span<const double> x,
                                 std::string_view group,
                                 std::span<const double> center = {});

inline constexpr int kModelFormatVersion = 1;

nlohmann::json ModelToJson(const MlmModel& model);
// Throws kConfigError on a malformed or wrong-version document.
MlmModel ModelFromJson(const nlohmann::json& doc);

}  // namespace mlmaudit

#endif  // MLMAUDIT_MLM_H_
