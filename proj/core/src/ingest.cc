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

#include "mlmaudit/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

#include "mlmaudit/error.h"
#include "mlmaudit/rng.h"

namespace mlmaudit {
namespace {

using Record = std::vector<std::string>;

// RFC 4180 records: quoted fields may contain separators, newlines and
// doubled quotes. CRLF and LF line endings are both accepted.
std::vector<Record> ReadRecords(std::istream& in, std::string_view source) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  std::vector<Record> records;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw AuditError(ErrorCode::kParseError,
                           std::string(source) + ": stray quote on line " +
                               std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw AuditError(ErrorCode::kParseError,
                     std::string(source) + ": unterminated quoted field");
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

bool ParseNumber(std::string_view text, double& out) {
  const std::string trimmed = Trim(text);
  if (trimmed.empty()) return false;
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::size_t ColumnIndex(const std::vector<std::string>& header,
                        const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw AuditError(ErrorCode::kMissingColumn,
                     "column '" + name + "' is not in the dataset header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string RowContext(std::string_view source, std::size_t data_row,
                       const std::string& column) {
  return std::string(source) + ": data row " + std::to_string(data_row + 1) +
         ", column '" + column + "'";
}

}  // namespace

void ColumnRoles::Validate() const {
  if (feature_columns.empty()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "at least one feature column is required");
  }
  std::set<std::string> seen;
  auto claim = [&](const std::string& name, std::string_view role) {
    if (name.empty()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "role '" + std::string(role) + "' has no column");
    }
    if (!seen.insert(name).second) {
      throw AuditError(ErrorCode::kDuplicateRole,
                       "column '" + name + "' is assigned to more than one "
                       "role (" + std::string(role) + ")");
    }
  };
  for (const auto& f : feature_columns) claim(f, "feature");
  claim(group_column, "group");
  claim(sensitive_column, "sensitive");
  claim(target_column, "target");
  if (!std::isfinite(target_threshold)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "target_threshold must be finite");
  }
}

int Dataset::GroupIndex(std::string_view label) const {
  const auto it = std::find(groups.begin(), groups.end(), label);
  return it == groups.end() ? -1 : static_cast<int>(it - groups.begin());
}

std::vector<std::size_t> Dataset::RowsInGroup(int group) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < group_of_row.size(); ++i) {
    if (group_of_row[i] == group) rows.push_back(i);
  }
  return rows;
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.header = header;
  out.feature_names = feature_names;
  out.groups = groups;
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      features.cols());
  const bool labelled = has_target();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t src = rows[r];
    if (src >= num_rows()) {
      throw AuditError(ErrorCode::kInvalidArgument, "subset row out of range");
    }
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(src));
    out.group_of_row.push_back(group_of_row[src]);
    out.sensitive.push_back(sensitive[src]);
    out.privileged.push_back(privileged[src]);
    out.raw_target.push_back(raw_target[src]);
    if (labelled) out.target.push_back(target[src]);
    out.row_ids.push_back(row_ids[src]);
  }
  return out;
}

std::vector<double> Dataset::Row(std::size_t row) const {
  std::vector<double> x(num_features());
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = features(static_cast<Eigen::Index>(row),
                    static_cast<Eigen::Index>(k));
  }
  return x;
}

Dataset ParseCsv(std::istream& in, const ColumnRoles& roles,
                 std::string_view source) {
  roles.Validate();
  std::vector<Record> records = ReadRecords(in, source);
  if (records.empty()) {
    throw AuditError(ErrorCode::kEmptyDataset,
                     std::string(source) + ": no header row");
  }
  Dataset ds;
  for (auto& name : records.front()) ds.header.push_back(Trim(name));
  if (!ds.header.empty() && ds.header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    ds.header[0].erase(0, 3);
  }

  std::vector<std::size_t> feature_idx;
  for (const auto& name : roles.feature_columns) {
    feature_idx.push_back(ColumnIndex(ds.header, name));
  }
  const std::size_t group_idx = ColumnIndex(ds.header, roles.group_column);
  const std::size_t sensitive_idx =
      ColumnIndex(ds.header, roles.sensitive_column);
  const std::size_t target_idx = ColumnIndex(ds.header, roles.target_column);

  const std::size_t n = records.size() - 1;
  if (n == 0) {
    throw AuditError(ErrorCode::kEmptyDataset,
                     std::string(source) + ": header but no data rows");
  }
  ds.feature_names = roles.feature_columns;
  ds.features.resize(static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(feature_idx.size()));
  std::vector<std::string> group_labels;
  group_labels.reserve(n);

  for (std::size_t r = 0; r < n; ++r) {
    const Record& rec = records[r + 1];
    if (rec.size() != ds.header.size()) {
      throw AuditError(ErrorCode::kParseError,
                       std::string(source) + ": data row " +
                           std::to_string(r + 1) + " has " +
                           std::to_string(rec.size()) + " fields, header has " +
                           std::to_string(ds.header.size()));
    }
    auto required = [&](std::size_t idx) -> std::string {
      std::string value = Trim(rec[idx]);
      if (value.empty() || value == "NA" || value == "NaN") {
        throw AuditError(ErrorCode::kMissingValue,
                         RowContext(source, r, ds.header[idx]) +
                             ": missing value");
      }
      return value;
    };
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      const std::string text = required(feature_idx[k]);
      double value = 0.0;
      if (!ParseNumber(text, value)) {
        throw AuditError(ErrorCode::kParseError,
                         RowContext(source, r, ds.header[feature_idx[k]]) +
                             ": '" + text +
                             "' is not a finite number (categorical features "
                             "are not supported)");
      }
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          value;
    }
    group_labels.push_back(required(group_idx));
    ds.sensitive.push_back(required(sensitive_idx));
    ds.privileged.push_back(
        ds.sensitive.back() == roles.sensitive_privileged_value ? 1 : 0);
    ds.raw_target.push_back(required(target_idx));
    ds.row_ids.push_back(r);
  }

  ds.groups = group_labels;
  std::sort(ds.groups.begin(), ds.groups.end());
  ds.groups.erase(std::unique(ds.groups.begin(), ds.groups.end()),
                  ds.groups.end());
  ds.group_of_row.reserve(n);
  for (const auto& label : group_labels) {
    ds.group_of_row.push_back(ds.GroupIndex(label));
  }
  return ds;
}

Dataset LoadCsv(const std::string& path, const ColumnRoles& roles) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw AuditError(ErrorCode::kIoError, "cannot open '" + path + "'");
  }
  return ParseCsv(in, roles, path);
}

Dataset DeriveTarget(const Dataset& ds, const ColumnRoles& roles) {
  Dataset out = ds;
  out.target.assign(ds.num_rows(), 0);
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    double value = 0.0;
    if (!ParseNumber(ds.raw_target[r], value)) {
      throw AuditError(ErrorCode::kParseError,
                       "data row " + std::to_string(ds.row_ids[r] + 1) +
                           ", column '" + roles.target_column + "': '" +
                           ds.raw_target[r] + "' is not a number");
    }
    out.target[r] = value > roles.target_threshold ? 1 : 0;
  }
  return out;
}

TrainTestSplit Split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "test_fraction must lie in (0, 1)");
  }
  const std::size_t min_train = ds.num_features() + 2;
  Rng rng = MakeRng(spec.seed);
  std::vector<char> is_test(ds.num_rows(), 0);

  auto draw = [&](std::vector<std::size_t> rows, const std::string& what) {
    const std::size_t size = rows.size();
    const auto wanted = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(size)));
    const std::size_t n_test = std::max<std::size_t>(1, wanted);
    if (size < n_test + min_train) {
      throw AuditError(ErrorCode::kGroupTooSmall,
                       what + " has " + std::to_string(size) +
                           " rows; needs at least " +
                           std::to_string(n_test + min_train) + " for a " +
                           std::to_string(n_test) + "-row test slice");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < n_test; ++i) is_test[rows[i]] = 1;
  };

  if (spec.stratify_by_group) {
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
      auto rows = ds.RowsInGroup(static_cast<int>(g));
      if (rows.empty()) continue;
      draw(std::move(rows), "group '" + ds.groups[g] + "'");
    }
  } else {
    std::vector<std::size_t> rows(ds.num_rows());
    std::iota(rows.begin(), rows.end(), 0);
    draw(std::move(rows), "dataset");
  }

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    (is_test[i] ? test_rows : train_rows).push_back(i);
  }
  return {ds.Subset(train_rows), ds.Subset(test_rows)};
}

}  // namespace mlmaudit
