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

#include "mlmaudit/attribution.h"

#include "mlmaudit/error.h"

namespace mlmaudit {

std::string_view MethodName(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kIntrinsic: return "intrinsic";
    case AttributionMethod::kKernelShap: return "kernel_shap";
    case AttributionMethod::kLinearLime: return "linear_lime";
  }
  return "intrinsic";
}

AttributionMethod ParseMethod(std::string_view name) {
  if (name == "intrinsic") return AttributionMethod::kIntrinsic;
  if (name == "kernel_shap" || name == "shap") return AttributionMethod::kKernelShap;
  if (name == "linear_lime" || name == "lime") return AttributionMethod::kLinearLime;
  throw AuditError(ErrorCode::kInvalidArgument,
                   "unknown attribution method '" + std::string(name) + "'");
}

double Attribution::Reconstructed() const {
  double total = base;
  for (double c : contributions) total += c;
  return total;
}

nlohmann::json ToJson(const Attribution& attribution,
                      const std::vector<std::string>& feature_names) {
  nlohmann::json contributions = nlohmann::json::object();
  for (std::size_t k = 0; k < attribution.contributions.size(); ++k) {
    const std::string name =
        k < feature_names.size() ? feature_names[k] : "x" + std::to_string(k);
    contributions[name] = attribution.contributions[k];
  }
  nlohmann::json out = {
      {"method", MethodName(attribution.method)},
      {"group", attribution.group},
      {"base", attribution.base},
      {"contributions", contributions},
      {"reconstructed_log_odds", attribution.Reconstructed()},
  };
  if (attribution.instance_id >= 0) out["instance_id"] = attribution.instance_id;
  if (!attribution.instance.empty()) out["instance"] = attribution.instance;
  if (!attribution.slopes.empty()) out["surrogate_slopes"] = attribution.slopes;
  return out;
}

}  // namespace mlmaudit
