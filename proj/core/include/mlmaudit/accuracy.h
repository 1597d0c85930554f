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

#ifndef MLMAUDIT_ACCURACY_H_
#define MLMAUDIT_ACCURACY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/outcome.h"

namespace mlmaudit {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts Confusion(std::span<const int> y_true,
                          std::span<const int> y_pred);

// Flagged "NoPositives" when tp = fp = fn = 0. When a precision or recall
// denominator is zero the value is 0 with flag "ZeroDivision".
Outcome F1Score(std::span<const int> y_true, std::span<const int> y_pred);

// Mann-Whitney AUC via mid-rank sums. Throws kSingleClass when one class is
// absent.
double AucRoc(std::span<const int> y_true, std::span<const double> scores);

struct GroupAccuracy {
  std::string group;
  std::size_t rows = 0;
  Outcome f1;
  Outcome auc;
};

struct AccuracyReport {
  std::vector<GroupAccuracy> per_group;  // in model group order
  Outcome macro_f1;
  Outcome macro_auc;
};

// Per-group F1 / AUC on `test` and their mean over the groups where each is
// defined. `weighted` switches to a row-count weighted mean.
AccuracyReport PerGroupAccuracy(const MlmModel& model, const Dataset& test,
                                double threshold = 0.5, bool weighted = false);

}  // namespace mlmaudit

#endif  // MLMAUDIT_ACCURACY_H_
