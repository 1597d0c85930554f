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

#ifndef MLMAUDIT_EXPLAINERS_H_
#define MLMAUDIT_EXPLAINERS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mlmaudit/attribution.h"
#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"

namespace mlmaudit {

// Scalar model output (log-odds) of one feature vector.
using BlackBox = std::function<double(std::span<const double>)>;

BlackBox ModelLogOdds(const MlmModel& model, int group);

struct BackgroundSet {
  Eigen::MatrixXd rows;  // background rows x features
  std::uint64_t seed = 0;
};

// Up to `max_rows` training rows of one group, sampled without replacement.
BackgroundSet SampleBackground(const Dataset& train, int group,
                               std::size_t max_rows, std::uint64_t seed);

inline constexpr std::size_t kMaxExactShapFeatures = 15;

// Exact Kernel SHAP: Shapley-kernel weighted least squares over all
// 2^M - 2 proper coalitions, absent features marginalized over `background`,
// efficiency imposed as a hard constraint. The solution coincides with the
// Shapley values of v(S) = E_bg[f(x_S, X_notS)].
Attribution KernelShap(const BlackBox& f, std::span<const double> x,
                       const BackgroundSet& background);

struct LimeConfig {
  std::size_t n_samples = 5000;
  // Defaults to 0.75 * sqrt(M) when unset.
  std::optional<double> kernel_width;
  double ridge_lambda = 1e-3;
  // Per-feature Gaussian perturbation std, usually the training std.
  std::vector<double> perturbation_scale;
  std::uint64_t seed = 0;
};

// Linear LIME around x: Gaussian perturbations, exponential kernel on the
// standardized distance, weighted ridge fit. contributions_k = slope_k * x_k,
// base = surrogate intercept. Zero-scale features are left out of the fit
// and get contribution 0.
Attribution LinearLime(const BlackBox& f, std::span<const double> x,
                       const LimeConfig& config);

// Per-feature sample standard deviation of the training features.
std::vector<double> FeatureStd(const Dataset& train);

}  // namespace mlmaudit

#endif  // MLMAUDIT_EXPLAINERS_H_
