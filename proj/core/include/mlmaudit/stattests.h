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

#ifndef MLMAUDIT_STATTESTS_H_
#define MLMAUDIT_STATTESTS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mlmaudit/mlm.h"

namespace mlmaudit {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t sample_size = 0;
  std::string notes;
};

// kCentered regresses each feature on the others plus an intercept (the
// textbook VIF). kUncentered omits the intercept and uses the uncentered
// R^2 = 1 - RSS / sum(x^2), which is what statsmodels'
// variance_inflation_factor reports when the design has no constant column.
enum class VifMode { kCentered, kUncentered };

struct VifResult {
  std::vector<double> values;
  // True where R^2 >= 1 - 1e-12; the value is +infinity there.
  std::vector<bool> perfect_collinearity;
};

VifResult Vif(const Eigen::MatrixXd& features,
              VifMode mode = VifMode::kCentered);

// Shapiro-Wilk W with the Royston (1995, AS R94) p-value approximation.
// Requires 3 <= n <= 5000 and a non-constant sample.
TestResult ShapiroWilk(std::span<const double> sample);

enum class BreuschPaganVariant {
  kClassic,  // Breusch-Pagan / Cook-Weisberg: ESS / 2 of e^2 / sigma^2
  kKoenker,  // studentized: n * R^2 of e^2
};

// `design` holds the regressors without a constant column; the intercept is
// appended internally. Degrees of freedom = design.cols().
TestResult BreuschPagan(std::span<const double> residuals,
                        const Eigen::MatrixXd& design,
                        BreuschPaganVariant variant =
                            BreuschPaganVariant::kClassic);

struct RandomEffectNormality {
  bool insufficient_groups = false;
  std::size_t num_groups = 0;
  // (effect name, Shapiro-Wilk result), e.g. ("alpha", ...), ("beta[age]", ...)
  std::vector<std::pair<std::string, TestResult>> effects;
};

// Applies Shapiro-Wilk to the per-group intercepts and to each varying slope
// when the model has at least `min_groups` groups.
RandomEffectNormality TestRandomEffectNormality(const MlmModel& model,
                                                std::size_t min_groups = 8);

}  // namespace mlmaudit

#endif  // MLMAUDIT_STATTESTS_H_
