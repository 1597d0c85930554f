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

#ifndef MLMAUDIT_OUTCOME_H_
#define MLMAUDIT_OUTCOME_H_

#include <optional>
#include <string>
#include <utility>

namespace mlmaudit {

// A KPI value or a flagged non-result (e.g. "SingleClass"). A present value
// may still carry an informational flag such as "ZeroDivision".
struct Outcome {
  std::optional<double> value;
  std::string flag;

  bool ok() const { return value.has_value(); }

  static Outcome Of(double v, std::string flag = {}) {
    return Outcome{v, std::move(flag)};
  }
  static Outcome Flagged(std::string flag) {
    return Outcome{std::nullopt, std::move(flag)};
  }

  bool operator==(const Outcome&) const = default;
};

}  // namespace mlmaudit

#endif  // MLMAUDIT_OUTCOME_H_
