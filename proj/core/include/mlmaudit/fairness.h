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

#ifndef MLMAUDIT_FAIRNESS_H_
#define MLMAUDIT_FAIRNESS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/outcome.h"

namespace mlmaudit {

// Per-row predicted class, actual class and privileged flag (1 = S = 1).
struct GroupFairnessInput {
  std::vector<int> y_true;
  std::vector<int> y_pred;
  std::vector<int> privileged;
  std::vector<int> group;  // MLM-group index per row

  std::size_t size() const { return y_pred.size(); }
  GroupFairnessInput Slice(int group_index) const;
  // Same rows with privileged / under-privileged swapped.
  GroupFairnessInput Swapped() const;
};

// |P[Yhat=1 | S=1] - P[Yhat=1 | S!=1]|. Throws kEmptySide.
double StatisticalParity(const GroupFairnessInput& in);

// P[Yhat=1 | S!=1] / P[Yhat=1 | S=1], so values below 1 mean the
// under-privileged side receives fewer positive predictions (0.8 rule).
// Throws kEmptySide or kZeroDenominator.
double DisparateImpact(const GroupFairnessInput& in);

struct EqualizedOdds {
  double diff_fpr = 0.0;
  double diff_tpr = 0.0;
  double equal_odds = 0.0;
};

// Throws kUndefinedRate when a side lacks actual positives or negatives.
EqualizedOdds ComputeEqualizedOdds(const GroupFairnessInput& in);

struct GroupFairnessBreakdown {
  std::string group;
  Outcome sp;
  Outcome di;
  Outcome diff_fpr;
  Outcome diff_tpr;
  Outcome equal_odds;
};

struct GroupFairnessReport {
  Outcome sp;
  Outcome di;
  Outcome equal_odds;  // pooled over all rows
  std::vector<GroupFairnessBreakdown> per_group;
};

GroupFairnessReport ComputeGroupFairness(
    const GroupFairnessInput& in, const std::vector<std::string>& groups);

GroupFairnessInput MakeFairnessInput(const MlmModel& model, const Dataset& ds,
                                     double threshold = 0.5);

// Normalized Euclidean distance: per-feature differences divided by the
// training standard deviation, excluded (sensitive) features skipped.
struct SimilaritySpec {
  std::vector<double> scales;
  std::vector<bool> excluded;
  double delta = 0.25;

  void Validate(std::size_t num_features) const;
  double Distance(std::span<const double> a, std::span<const double> b) const;

  static SimilaritySpec FromTraining(
      const Dataset& train, double delta,
      std::span<const std::string> excluded_features = {});
};

struct IndividualDiff {
  double distance = 0.0;
  double diff = 0.0;
  bool similar = false;  // distance <= delta
};

IndividualDiff DiffInd(const MlmModel& model, std::span<const double> a,
                       std::span<const double> b, std::string_view group,
                       const SimilaritySpec& spec);

double DiffIndMlm(const MlmModel& model, std::span<const double> x,
                  std::string_view group_a, std::string_view group_b);

struct SimilarPairScan {
  std::string group;
  Outcome max_diff;  // flagged "NoSimilarPairs" when pair_count == 0
  Outcome mean_diff;
  std::size_t pair_count = 0;
};

std::vector<SimilarPairScan> ScanSimilarPairs(const MlmModel& model,
                                              const Dataset& ds,
                                              const SimilaritySpec& spec);

struct InterGroupScan {
  std::string group_a;
  std::string group_b;
  double max_diff = 0.0;
  double mean_diff = 0.0;
};

// DiffIndMlm for every row of `ds` and every unordered pair of model groups.
std::vector<InterGroupScan> ScanInterGroup(const MlmModel& model,
                                           const Dataset& ds);

}  // namespace mlmaudit

#endif  // MLMAUDIT_FAIRNESS_H_
