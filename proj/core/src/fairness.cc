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

#include "mlmaudit/fairness.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "mlmaudit/error.h"

namespace mlmaudit {
namespace {

struct SideCounts {
  std::size_t rows = 0;
  std::size_t predicted_positive = 0;
  std::size_t actual_positive = 0;
  std::size_t actual_negative = 0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;

  double PositiveRate() const {
    return static_cast<double>(predicted_positive) / static_cast<double>(rows);
  }
};

// [0] = under-privileged, [1] = privileged.
std::array<SideCounts, 2> CountSides(const GroupFairnessInput& in) {
  if (in.y_pred.size() != in.privileged.size() ||
      (!in.y_true.empty() && in.y_true.size() != in.y_pred.size())) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "fairness input vectors differ in length");
  }
  std::array<SideCounts, 2> sides;
  for (std::size_t i = 0; i < in.size(); ++i) {
    SideCounts& s = sides[in.privileged[i] == 1 ? 1 : 0];
    ++s.rows;
    s.predicted_positive += in.y_pred[i] == 1;
    if (in.y_true.empty()) continue;
    if (in.y_true[i] == 1) {
      ++s.actual_positive;
      s.true_positive += in.y_pred[i] == 1;
    } else {
      ++s.actual_negative;
      s.false_positive += in.y_pred[i] == 1;
    }
  }
  return sides;
}

void RequireBothSides(const std::array<SideCounts, 2>& sides) {
  if (sides[0].rows == 0 || sides[1].rows == 0) {
    throw AuditError(ErrorCode::kEmptySide,
                     sides[1].rows == 0 ? "no privileged rows"
                                        : "no under-privileged rows");
  }
}

template <typename F>
Outcome Guard(F&& compute) {
  try {
    return Outcome::Of(compute());
  } catch (const AuditError& e) {
    return Outcome::Flagged(std::string(ErrorCodeName(e.code())));
  }
}

}  // namespace

GroupFairnessInput GroupFairnessInput::Slice(int group_index) const {
  GroupFairnessInput out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (group[i] != group_index) continue;
    if (!y_true.empty()) out.y_true.push_back(y_true[i]);
    out.y_pred.push_back(y_pred[i]);
    out.privileged.push_back(privileged[i]);
    out.group.push_back(group[i]);
  }
  return out;
}

GroupFairnessInput GroupFairnessInput::Swapped() const {
  GroupFairnessInput out = *this;
  for (int& p : out.privileged) p = p == 1 ? 0 : 1;
  return out;
}

double StatisticalParity(const GroupFairnessInput& in) {
  const auto sides = CountSides(in);
  RequireBothSides(sides);
  return std::abs(sides[1].PositiveRate() - sides[0].PositiveRate());
}

double DisparateImpact(const GroupFairnessInput& in) {
  const auto sides = CountSides(in);
  RequireBothSides(sides);
  if (sides[1].predicted_positive == 0) {
    throw AuditError(ErrorCode::kZeroDenominator,
                     "privileged positive-prediction rate is 0");
  }
  return sides[0].PositiveRate() / sides[1].PositiveRate();
}

EqualizedOdds ComputeEqualizedOdds(const GroupFairnessInput& in) {
  if (in.y_true.size() != in.y_pred.size()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "equalized odds needs actual labels");
  }
  const auto sides = CountSides(in);
  RequireBothSides(sides);
  for (const SideCounts& s : sides) {
    if (s.actual_positive == 0 || s.actual_negative == 0) {
      throw AuditError(ErrorCode::kUndefinedRate,
                       "a side lacks actual positives or negatives");
    }
  }
  auto fpr = [](const SideCounts& s) {
    return static_cast<double>(s.false_positive) /
           static_cast<double>(s.actual_negative);
  };
  auto tpr = [](const SideCounts& s) {
    return static_cast<double>(s.true_positive) /
           static_cast<double>(s.actual_positive);
  };
  EqualizedOdds out;
  out.diff_fpr = std::abs(fpr(sides[1]) - fpr(sides[0]));
  out.diff_tpr = std::abs(tpr(sides[1]) - tpr(sides[0]));
  out.equal_odds = 0.5 * (out.diff_fpr + out.diff_tpr);
  return out;
}

GroupFairnessReport ComputeGroupFairness(
    const GroupFairnessInput& in, const std::vector<std::string>& groups) {
  GroupFairnessReport report;
  report.sp = Guard([&] { return StatisticalParity(in); });
  report.di = Guard([&] { return DisparateImpact(in); });
  report.equal_odds = Guard([&] { return ComputeEqualizedOdds(in).equal_odds; });
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const GroupFairnessInput slice = in.Slice(static_cast<int>(g));
    GroupFairnessBreakdown row;
    row.group = groups[g];
    row.sp = Guard([&] { return StatisticalParity(slice); });
    row.di = Guard([&] { return DisparateImpact(slice); });
    try {
      const EqualizedOdds eo = ComputeEqualizedOdds(slice);
      row.diff_fpr = Outcome::Of(eo.diff_fpr);
      row.diff_tpr = Outcome::Of(eo.diff_tpr);
      row.equal_odds = Outcome::Of(eo.equal_odds);
    } catch (const AuditError& e) {
      const std::string flag(ErrorCodeName(e.code()));
      row.diff_fpr = row.diff_tpr = row.equal_odds = Outcome::Flagged(flag);
    }
    report.per_group.push_back(std::move(row));
  }
  return report;
}

GroupFairnessInput MakeFairnessInput(const MlmModel& model, const Dataset& ds,
                                     double threshold) {
  GroupFairnessInput in;
  in.y_pred = PredictClass(model, ds, threshold);
  if (ds.has_target()) in.y_true = ds.target;
  in.privileged = ds.privileged;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    in.group.push_back(model.GroupIndex(
        ds.groups[static_cast<std::size_t>(ds.group_of_row[i])]));
  }
  return in;
}

void SimilaritySpec::Validate(std::size_t num_features) const {
  if (scales.size() != num_features || excluded.size() != num_features) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "similarity spec does not match the feature count");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "similarity delta must be finite and >= 0");
  }
  for (std::size_t k = 0; k < num_features; ++k) {
    if (!excluded[k] && !(scales[k] > 0.0)) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "similarity scales must be positive");
    }
  }
}

double SimilaritySpec::Distance(std::span<const double> a,
                                std::span<const double> b) const {
  if (a.size() != scales.size() || b.size() != scales.size()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "instance size does not match the similarity spec");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (excluded[k]) continue;
    const double d = (a[k] - b[k]) / scales[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

SimilaritySpec SimilaritySpec::FromTraining(
    const Dataset& train, double delta,
    std::span<const std::string> excluded_features) {
  SimilaritySpec spec;
  spec.delta = delta;
  const std::size_t m = train.num_features();
  spec.excluded.assign(m, false);
  for (const std::string& name : excluded_features) {
    const auto it =
        std::find(train.feature_names.begin(), train.feature_names.end(), name);
    if (it == train.feature_names.end()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "excluded feature '" + name + "' is not a feature");
    }
    spec.excluded[static_cast<std::size_t>(it - train.feature_names.begin())] = true;
  }
  if (train.num_rows() < 2) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "similarity scaling needs at least 2 training rows");
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto col = train.features.col(static_cast<Eigen::Index>(k));
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() /
                       static_cast<double>(train.num_rows());
    spec.scales.push_back(std::sqrt(var));
    if (!spec.excluded[k] && !(spec.scales.back() > 0.0)) {
      throw AuditError(ErrorCode::kConstantColumn,
                       "feature '" + train.feature_names[k] +
                           "' is constant in the training data");
    }
  }
  spec.Validate(m);
  return spec;
}

IndividualDiff DiffInd(const MlmModel& model, std::span<const double> a,
                       std::span<const double> b, std::string_view group,
                       const SimilaritySpec& spec) {
  spec.Validate(model.num_features());
  IndividualDiff out;
  out.distance = spec.Distance(a, b);
  out.similar = out.distance <= spec.delta;
  out.diff = std::abs(PredictProba(model, a, group) - PredictProba(model, b, group));
  return out;
}

double DiffIndMlm(const MlmModel& model, std::span<const double> x,
                  std::string_view group_a, std::string_view group_b) {
  return std::abs(PredictProba(model, x, group_a) -
                  PredictProba(model, x, group_b));
}

std::vector<SimilarPairScan> ScanSimilarPairs(const MlmModel& model,
                                              const Dataset& ds,
                                              const SimilaritySpec& spec) {
  spec.Validate(model.num_features());
  std::vector<SimilarPairScan> out;
  for (const std::string& label : model.groups) {
    SimilarPairScan scan;
    scan.group = label;
    const int g = ds.GroupIndex(label);
    std::vector<std::vector<double>> rows;
    if (g >= 0) {
      for (std::size_t i : ds.RowsInGroup(g)) rows.push_back(ds.Row(i));
    }
    std::vector<double> probs;
    for (const auto& r : rows) probs.push_back(PredictProba(model, r, label));
    double max_diff = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        if (spec.Distance(rows[i], rows[j]) > spec.delta) continue;
        const double diff = std::abs(probs[i] - probs[j]);
        max_diff = std::max(max_diff, diff);
        sum += diff;
        ++scan.pair_count;
      }
    }
    if (scan.pair_count == 0) {
      scan.max_diff = Outcome::Flagged("NoSimilarPairs");
      scan.mean_diff = Outcome::Flagged("NoSimilarPairs");
    } else {
      scan.max_diff = Outcome::Of(max_diff);
      scan.mean_diff = Outcome::Of(sum / static_cast<double>(scan.pair_count));
    }
    out.push_back(std::move(scan));
  }
  return out;
}

std::vector<InterGroupScan> ScanInterGroup(const MlmModel& model,
                                           const Dataset& ds) {
  if (ds.num_rows() == 0) {
    throw AuditError(ErrorCode::kEmptyDataset, "no rows to scan");
  }
  std::vector<InterGroupScan> out;
  for (std::size_t a = 0; a < model.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < model.groups.size(); ++b) {
      InterGroupScan scan;
      scan.group_a = model.groups[a];
      scan.group_b = model.groups[b];
      double sum = 0.0;
      for (std::size_t i = 0; i < ds.num_rows(); ++i) {
        const std::vector<double> x = ds.Row(i);
        const double diff = DiffIndMlm(model, x, scan.group_a, scan.group_b);
        scan.max_diff = std::max(scan.max_diff, diff);
        sum += diff;
      }
      scan.mean_diff = sum / static_cast<double>(ds.num_rows());
      out.push_back(std::move(scan));
    }
  }
  return out;
}

}  // namespace mlmaudit
