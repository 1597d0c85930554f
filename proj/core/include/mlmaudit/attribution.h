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

#ifndef MLMAUDIT_ATTRIBUTION_H_
#define MLMAUDIT_ATTRIBUTION_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlmaudit {

enum class AttributionMethod { kIntrinsic, kKernelShap, kLinearLime };

std::string_view MethodName(AttributionMethod method);
// Accepts "intrinsic", "kernel_shap", "linear_lime". Throws kInvalidArgument.
AttributionMethod ParseMethod(std::string_view name);

// Additive explanation in log-odds space: base + sum(contributions) is the
// explained log-odds.
struct Attribution {
  AttributionMethod method = AttributionMethod::kIntrinsic;
  double base = 0.0;
  std::vector<double> contributions;
  std::string group;
  std::int64_t instance_id = -1;
  std::vector<double> instance;
  // Raw surrogate slopes; only filled by Linear LIME.
  std::vector<double> slopes;

  double Reconstructed() const;
};

nlohmann::json ToJson(const Attribution& attribution,
                      const std::vector<std::string>& feature_names);

}  // namespace mlmaudit

#endif  // MLMAUDIT_ATTRIBUTION_H_
