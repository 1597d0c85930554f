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

#ifndef MLMAUDIT_INGEST_H_
#define MLMAUDIT_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mlmaudit {

struct ColumnRoles {
  std::vector<std::string> feature_columns;
  std::string group_column;
  std::string sensitive_column;
  // Category of sensitive_column treated as the privileged class (S = 1).
  std::string sensitive_privileged_value;
  std::string target_column;
  // Rows with raw target strictly greater than this are labelled 1.
  double target_threshold = 0.0;

  // Throws kInvalidArgument / kDuplicateRole on an empty feature list or
  // overlapping role columns.
  void Validate() const;
};

struct SplitSpec {
  double test_fraction = 0.05;
  std::uint64_t seed = 0;
  bool stratify_by_group = true;
};

// Typed view of one CSV after role assignment. Feature columns are numeric,
// the group and sensitive columns are categorical labels. `groups` is the
// sorted set of distinct group labels of the source file and is carried
// unchanged into every subset so group indices stay comparable.
struct Dataset {
  std::vector<std::string> header;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;  // rows x features
  std::vector<std::string> groups;
  std::vector<int> group_of_row;
  std::vector<std::string> sensitive;
  std::vector<int> privileged;
  std::vector<std::string> raw_target;
  std::vector<int> target;  // empty until DeriveTarget
  std::vector<std::size_t> row_ids;

  std::size_t num_rows() const { return group_of_row.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  bool has_target() const { return target.size() == num_rows(); }

  // Index of `label` in groups, or -1.
  int GroupIndex(std::string_view label) const;
  std::vector<std::size_t> RowsInGroup(int group) const;
  Dataset Subset(std::span<const std::size_t> rows) const;
  std::vector<double> Row(std::size_t row) const;
};

// Parses CSV text. `source` names the input in error messages.
Dataset ParseCsv(std::istream& in, const ColumnRoles& roles,
                 std::string_view source = "<stream>");
Dataset LoadCsv(const std::string& path, const ColumnRoles& roles);

// Labels target = 1 iff raw target > roles.target_threshold. The raw column
// is kept. Idempotent.
Dataset DeriveTarget(const Dataset& ds, const ColumnRoles& roles);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Seeded partition. With stratify_by_group each group contributes
// max(1, round(test_fraction * size)) test rows and must keep at least
// num_features + 2 training rows (kGroupTooSmall otherwise). Row order is
// preserved inside both parts.
TrainTestSplit Split(const Dataset& ds, const SplitSpec& spec);

}  // namespace mlmaudit

#endif  // MLMAUDIT_INGEST_H_
