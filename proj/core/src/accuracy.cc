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

#include "mlmaudit/accuracy.h"

#include <algorithm>
#include <numeric>

#include "mlmaudit/error.h"

namespace mlmaudit {
namespace {

void CheckBinary(std::span<const int> values, const char* what) {
  for (int v : values) {
    if (v != 0 && v != 1) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       std::string(what) + " must be 0/1");
    }
  }
}

}  // namespace

ConfusionCounts Confusion(std::span<const int> y_true,
                          std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "labels and predictions must have equal non-zero length");
  }
  CheckBinary(y_true, "labels");
  CheckBinary(y_pred, "predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? c.tp : c.fn)++;
    } else {
      (y_pred[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

Outcome F1Score(std::span<const int> y_true, std::span<const int> y_pred) {
  const ConfusionCounts c = Confusion(y_true, y_pred);
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) return Outcome::Flagged("NoPositives");
  const double f1 = 2.0 * static_cast<double>(c.tp) /
                    static_cast<double>(2 * c.tp + c.fp + c.fn);
  if (c.tp + c.fp == 0 || c.tp + c.fn == 0) return Outcome::Of(f1, "ZeroDivision");
  return Outcome::Of(f1);
}

double AucRoc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "labels and scores must have equal length");
  }
  CheckBinary(y_true, "labels");
  const std::size_t n = y_true.size();
  const auto positives =
      static_cast<std::size_t>(std::count(y_true.begin(), y_true.end(), 1));
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw AuditError(ErrorCode::kSingleClass,
                     "AUC needs both classes, got " + std::to_string(positives) +
                         " positive of " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (y_true[order[k]] == 1) positive_rank_sum += mid_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

AccuracyReport PerGroupAccuracy(const MlmModel& model, const Dataset& test,
                                double threshold, bool weighted) {
  if (!test.has_target()) {
    throw AuditError(ErrorCode::kInvalidArgument, "test data has no target");
  }
  const std::vector<double> probs = PredictProba(model, test);
  AccuracyReport report;
  double f1_sum = 0.0, f1_weight = 0.0, auc_sum = 0.0, auc_weight = 0.0;
  for (const std::string& label : model.groups) {
    GroupAccuracy acc;
    acc.group = label;
    const int g = test.GroupIndex(label);
    std::vector<int> y;
    std::vector<int> pred;
    std::vector<double> score;
    if (g >= 0) {
      for (std::size_t i : test.RowsInGroup(g)) {
        y.push_back(test.target[i]);
        score.push_back(probs[i]);
        pred.push_back(probs[i] >= threshold ? 1 : 0);
      }
    }
    acc.rows = y.size();
    if (y.empty()) {
      acc.f1 = Outcome::Flagged("NoRows");
      acc.auc = Outcome::Flagged("NoRows");
    } else {
      acc.f1 = F1Score(y, pred);
      try {
        acc.auc = Outcome::Of(AucRoc(y, score));
      } catch (const AuditError& e) {
        acc.auc = Outcome::Flagged(std::string(ErrorCodeName(e.code())));
      }
    }
    const double w = weighted ? static_cast<double>(acc.rows) : 1.0;
    if (acc.f1.ok()) {
      f1_sum += w * *acc.f1.value;
      f1_weight += w;
    }
    if (acc.auc.ok()) {
      auc_sum += w * *acc.auc.value;
      auc_weight += w;
    }
    report.per_group.push_back(std::move(acc));
  }
  report.macro_f1 = f1_weight > 0 ? Outcome::Of(f1_sum / f1_weight)
                                  : Outcome::Flagged("NoDefinedGroups");
  report.macro_auc = auc_weight > 0 ? Outcome::Of(auc_sum / auc_weight)
                                    : Outcome::Flagged("NoDefinedGroups");
  return report;
}

}  // namespace mlmaudit
