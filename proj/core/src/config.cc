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

#include "mlmaudit/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "mlmaudit/error.h"
#include "mlmaudit/rng.h"

namespace mlmaudit {
namespace {

using nlohmann::json;

// Keys whose object values are free-form (validated by their own parsers).
bool IsFreeForm(const std::string& path) {
  return path == "rag_bands" || path == "annotations";
}

void CheckKeys(const json& doc, const json& defaults, const std::string& path) {
  if (!doc.is_object()) {
    throw AuditError(ErrorCode::kConfigError,
                     (path.empty() ? std::string("config") : path) +
                         " must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    const std::string child = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) {
      throw AuditError(ErrorCode::kConfigError,
                       "unknown configuration key '" + child + "'");
    }
    const json& def = defaults.at(key);
    if (def.is_object() && !IsFreeForm(child)) CheckKeys(value, def, child);
  }
}

json Merge(const json& defaults, const json& doc, const std::string& path) {
  json out = defaults;
  for (const auto& [key, value] : doc.items()) {
    const std::string child = path.empty() ? key : path + "." + key;
    if (defaults.at(key).is_object() && !IsFreeForm(child)) {
      out[key] = Merge(defaults.at(key), value, child);
    } else {
      out[key] = value;
    }
  }
  return out;
}

template <typename T>
T Get(const json& node, const char* key, const std::string& path) {
  try {
    return node.at(key).get<T>();
  } catch (const json::exception&) {
    throw AuditError(ErrorCode::kConfigError,
                     "configuration key '" + path + key + "' has the wrong type");
  }
}

double Positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw AuditError(ErrorCode::kConfigError, "'" + key + "' must be > 0");
  }
  return v;
}

NamedInstance NamedFromJson(const json& node, const std::string& key) {
  if (!node.is_object() || node.empty()) {
    throw AuditError(ErrorCode::kConfigError,
                     "'" + key + "' must be an object of feature values");
  }
  NamedInstance out;
  for (const auto& [name, value] : node.items()) {
    if (!value.is_number()) {
      throw AuditError(ErrorCode::kConfigError,
                       "'" + key + "." + name + "' must be a number");
    }
    out.emplace_back(name, value.get<double>());
  }
  return out;
}

void CheckObjectKeys(const json& node, std::initializer_list<const char*> keys,
                     const std::string& path) {
  if (!node.is_object()) {
    throw AuditError(ErrorCode::kConfigError, "'" + path + "' must be an object");
  }
  for (const auto& [key, value] : node.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      throw AuditError(ErrorCode::kConfigError,
                       "unknown configuration key '" + path + "." + key + "'");
    }
  }
  for (const char* k : keys) {
    if (!node.contains(k)) {
      throw AuditError(ErrorCode::kConfigError,
                       "missing configuration key '" + path + "." + k + "'");
    }
  }
}

}  // namespace

json DefaultConfigJson() {
  return json::parse(R"({
  "dataset": "data/insurance.csv",
  "model_path": null,
  "roles": {
    "features": ["age", "bmi", "children"],
    "group": "region",
    "sensitive": "sex",
    "privileged_value": "male",
    "target": "charges",
    "target_threshold": 6000
  },
  "split": {"test_fraction": 0.05, "stratify_by_group": true, "seed": null},
  "model": {
    "varying_intercept": true,
    "varying_slopes": ["age", "bmi"],
    "fixed_slopes": ["children"]
  },
  "fit": {
    "tolerance": 1e-8,
    "max_iterations": 200,
    "max_newton_steps": 50,
    "separation_bound": 50,
    "variance_floor": 1e-8,
    "fixed_variance": null,
    "variance_update": "mode_deviation"
  },
  "decision_threshold": 0.5,
  "diagnostics": {
    "vif_mode": "uncentered",
    "residual_kind": "pearson",
    "bp_variant": "classic",
    "random_effect_min_groups": 8
  },
  "accuracy": {"average": "macro"},
  "fairness": {
    "slice": "test",
    "similarity_delta": 0.25,
    "similarity_excluded": [],
    "diff_ind_examples": [],
    "diff_ind_mlm_examples": []
  },
  "explainers": {
    "background_size": 100,
    "lime": {"n_samples": 5000, "kernel_width": null, "ridge_lambda": 0.001}
  },
  "protocol": {"n_instances": 50, "n_repeats": 10},
  "explain_instances": [],
  "rag_bands": {},
  "annotations": {
    "model_assumptions_documentation": {"text": "", "rag": null}
  },
  "seed": 0,
  "output": {"path": "audit_report", "format": "both"}
})");
}

AuditConfig ParseConfig(const json& doc, const std::filesystem::path& base_dir) {
  const json defaults = DefaultConfigJson();
  CheckKeys(doc, defaults, "");
  const json c = Merge(defaults, doc, "");

  AuditConfig cfg;
  cfg.effective = c;
  try {
    const auto dataset = Get<std::string>(c, "dataset", "");
    cfg.dataset = std::filesystem::path(dataset).is_absolute()
                      ? std::filesystem::path(dataset)
                      : base_dir / dataset;
    if (!c.at("model_path").is_null()) {
      const auto model = Get<std::string>(c, "model_path", "");
      cfg.model_path = std::filesystem::path(model).is_absolute()
                           ? std::filesystem::path(model)
                           : base_dir / model;
    }

    const json& roles = c.at("roles");
    cfg.roles.feature_columns =
        Get<std::vector<std::string>>(roles, "features", "roles.");
    cfg.roles.group_column = Get<std::string>(roles, "group", "roles.");
    cfg.roles.sensitive_column = Get<std::string>(roles, "sensitive", "roles.");
    cfg.roles.sensitive_privileged_value =
        Get<std::string>(roles, "privileged_value", "roles.");
    cfg.roles.target_column = Get<std::string>(roles, "target", "roles.");
    cfg.roles.target_threshold = Get<double>(roles, "target_threshold", "roles.");
    try {
      cfg.roles.Validate();
    } catch (const AuditError& e) {
      throw AuditError(ErrorCode::kConfigError, std::string("roles: ") + e.what());
    }

    const json& split = c.at("split");
    cfg.split.test_fraction = Get<double>(split, "test_fraction", "split.");
    if (!(cfg.split.test_fraction > 0.0 && cfg.split.test_fraction < 1.0)) {
      throw AuditError(ErrorCode::kConfigError,
                       "'split.test_fraction' must lie in (0, 1)");
    }
    cfg.split.stratify_by_group = Get<bool>(split, "stratify_by_group", "split.");
    if (!split.at("seed").is_null()) {
      cfg.split.seed = Get<std::uint64_t>(split, "seed", "split.");
      cfg.split_seed_explicit = true;
    }

    const json& model = c.at("model");
    cfg.model_spec.varying_intercept = Get<bool>(model, "varying_intercept", "model.");
    cfg.model_spec.varying_slope_features =
        Get<std::vector<std::string>>(model, "varying_slopes", "model.");
    cfg.model_spec.fixed_slope_features =
        Get<std::vector<std::string>>(model, "fixed_slopes", "model.");
    try {
      cfg.model_spec.Validate(cfg.roles.feature_columns);
    } catch (const AuditError& e) {
      throw AuditError(ErrorCode::kConfigError, std::string("model: ") + e.what());
    }

    const json& fit = c.at("fit");
    cfg.fit.tolerance = Positive(Get<double>(fit, "tolerance", "fit."), "fit.tolerance");
    cfg.fit.max_iterations = Get<int>(fit, "max_iterations", "fit.");
    cfg.fit.max_newton_steps = Get<int>(fit, "max_newton_steps", "fit.");
    if (cfg.fit.max_iterations < 1 || cfg.fit.max_newton_steps < 1) {
      throw AuditError(ErrorCode::kConfigError,
                       "'fit.max_iterations' and 'fit.max_newton_steps' must be >= 1");
    }
    cfg.fit.separation_bound = Positive(Get<double>(fit, "separation_bound", "fit."),
                                        "fit.separation_bound");
    cfg.fit.variance_floor =
        Positive(Get<double>(fit, "variance_floor", "fit."), "fit.variance_floor");
    if (!fit.at("fixed_variance").is_null()) {
      cfg.fit.fixed_variance = Positive(Get<double>(fit, "fixed_variance", "fit."),
                                        "fit.fixed_variance");
    }
    {
      const auto update = Get<std::string>(fit, "variance_update", "fit.");
      try {
        cfg.fit.variance_update = ParseVarianceUpdate(update);
      } catch (const AuditError&) {
        throw AuditError(ErrorCode::kConfigError,
                         "'fit.variance_update' must be mode_deviation or laplace_em");
      }
    }

    cfg.decision_threshold = Get<double>(c, "decision_threshold", "");
    if (!(cfg.decision_threshold > 0.0 && cfg.decision_threshold < 1.0)) {
      throw AuditError(ErrorCode::kConfigError,
                       "'decision_threshold' must lie in (0, 1)");
    }

    const json& diag = c.at("diagnostics");
    const auto vif = Get<std::string>(diag, "vif_mode", "diagnostics.");
    if (vif == "centered") {
      cfg.vif_mode = VifMode::kCentered;
    } else if (vif == "uncentered") {
      cfg.vif_mode = VifMode::kUncentered;
    } else {
      throw AuditError(ErrorCode::kConfigError,
                       "'diagnostics.vif_mode' must be centered or uncentered");
    }
    try {
      cfg.residual_kind =
          ParseResidualKind(Get<std::string>(diag, "residual_kind", "diagnostics."));
    } catch (const AuditError& e) {
      throw AuditError(ErrorCode::kConfigError,
                       std::string("diagnostics.residual_kind: ") + e.what());
    }
    const auto bp = Get<std::string>(diag, "bp_variant", "diagnostics.");
    if (bp == "classic") {
      cfg.bp_variant = BreuschPaganVariant::kClassic;
    } else if (bp == "koenker") {
      cfg.bp_variant = BreuschPaganVariant::kKoenker;
    } else {
      throw AuditError(ErrorCode::kConfigError,
                       "'diagnostics.bp_variant' must be classic or koenker");
    }
    cfg.random_effect_min_groups =
        Get<std::size_t>(diag, "random_effect_min_groups", "diagnostics.");

    const auto average = Get<std::string>(c.at("accuracy"), "average", "accuracy.");
    if (average != "macro" && average != "weighted") {
      throw AuditError(ErrorCode::kConfigError,
                       "'accuracy.average' must be macro or weighted");
    }
    cfg.weighted_accuracy = average == "weighted";

    const json& fair = c.at("fairness");
    const auto slice = Get<std::string>(fair, "slice", "fairness.");
    if (slice != "test" && slice != "full") {
      throw AuditError(ErrorCode::kConfigError,
                       "'fairness.slice' must be test or full");
    }
    cfg.fairness_on_test = slice == "test";
    cfg.similarity_delta = Get<double>(fair, "similarity_delta", "fairness.");
    if (!(cfg.similarity_delta >= 0.0) || !std::isfinite(cfg.similarity_delta)) {
      throw AuditError(ErrorCode::kConfigError,
                       "'fairness.similarity_delta' must be >= 0");
    }
    cfg.similarity_excluded =
        Get<std::vector<std::string>>(fair, "similarity_excluded", "fairness.");
    for (const json& e : fair.at("diff_ind_examples")) {
      CheckObjectKeys(e, {"group", "a", "b"}, "fairness.diff_ind_examples[]");
      cfg.diff_ind_examples.push_back(
          {Get<std::string>(e, "group", "fairness.diff_ind_examples[]."),
           NamedFromJson(e.at("a"), "fairness.diff_ind_examples[].a"),
           NamedFromJson(e.at("b"), "fairness.diff_ind_examples[].b")});
    }
    for (const json& e : fair.at("diff_ind_mlm_examples")) {
      CheckObjectKeys(e, {"instance", "group_a", "group_b"},
                      "fairness.diff_ind_mlm_examples[]");
      cfg.diff_ind_mlm_examples.push_back(
          {NamedFromJson(e.at("instance"), "fairness.diff_ind_mlm_examples[].instance"),
           Get<std::string>(e, "group_a", "fairness.diff_ind_mlm_examples[]."),
           Get<std::string>(e, "group_b", "fairness.diff_ind_mlm_examples[].")});
    }

    const json& expl = c.at("explainers");
    cfg.explainers.background_size =
        Get<std::size_t>(expl, "background_size", "explainers.");
    if (cfg.explainers.background_size == 0) {
      throw AuditError(ErrorCode::kConfigError,
                       "'explainers.background_size' must be >= 1");
    }
    const json& lime = expl.at("lime");
    cfg.explainers.lime.n_samples = Get<std::size_t>(lime, "n_samples", "explainers.lime.");
    if (!lime.at("kernel_width").is_null()) {
      cfg.explainers.lime.kernel_width =
          Positive(Get<double>(lime, "kernel_width", "explainers.lime."),
                   "explainers.lime.kernel_width");
    }
    cfg.explainers.lime.ridge_lambda =
        Get<double>(lime, "ridge_lambda", "explainers.lime.");
    if (!(cfg.explainers.lime.ridge_lambda >= 0.0)) {
      throw AuditError(ErrorCode::kConfigError,
                       "'explainers.lime.ridge_lambda' must be >= 0");
    }
    if (cfg.explainers.lime.n_samples < 10 * cfg.roles.feature_columns.size()) {
      throw AuditError(ErrorCode::kConfigError,
                       "'explainers.lime.n_samples' must be >= 10 * features");
    }

    const json& protocol = c.at("protocol");
    cfg.n_instances = Get<std::size_t>(protocol, "n_instances", "protocol.");
    cfg.n_repeats = Get<std::size_t>(protocol, "n_repeats", "protocol.");
    if (cfg.n_instances == 0 || cfg.n_repeats == 0) {
      throw AuditError(ErrorCode::kConfigError,
                       "'protocol' counts must be >= 1");
    }
    for (const json& e : c.at("explain_instances")) {
      CheckObjectKeys(e, {"group", "instance"}, "explain_instances[]");
      cfg.explain_instances.push_back(
          {Get<std::string>(e, "group", "explain_instances[]."),
           NamedFromJson(e.at("instance"), "explain_instances[].instance")});
    }

    try {
      cfg.bands.ApplyOverrides(c.at("rag_bands"));
    } catch (const AuditError& e) {
      throw AuditError(ErrorCode::kConfigError, e.what());
    }

    const json& ann = c.at("annotations");
    if (!ann.is_object()) {
      throw AuditError(ErrorCode::kConfigError, "'annotations' must be an object");
    }
    for (const auto& [key, value] : ann.items()) {
      Annotation a;
      a.key = key;
      if (value.is_string()) {
        a.text = value.get<std::string>();
      } else {
        CheckObjectKeys(value, {"text", "rag"}, "annotations." + key);
        a.text = Get<std::string>(value, "text", "annotations." + key + ".");
        if (!value.at("rag").is_null()) {
          a.rag = ParseRag(Get<std::string>(value, "rag", "annotations." + key + "."));
        }
      }
      cfg.annotations.push_back(std::move(a));
    }

    cfg.seed = Get<std::uint64_t>(c, "seed", "");
    const json& out = c.at("output");
    cfg.output = Get<std::string>(out, "path", "output.");
    const auto format = Get<std::string>(out, "format", "output.");
    if (format == "json") {
      cfg.format = OutputFormat::kJson;
    } else if (format == "markdown") {
      cfg.format = OutputFormat::kMarkdown;
    } else if (format == "both") {
      cfg.format = OutputFormat::kBoth;
    } else {
      throw AuditError(ErrorCode::kConfigError,
                       "'output.format' must be json, markdown or both");
    }
  } catch (const json::exception& e) {
    throw AuditError(ErrorCode::kConfigError, e.what());
  } catch (const AuditError& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw AuditError(ErrorCode::kConfigError, e.what());
  }
  return cfg;
}

AuditConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw AuditError(ErrorCode::kIoError, "cannot open config '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw AuditError(ErrorCode::kConfigError,
                     "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return ParseConfig(doc, path.parent_path());
}

std::vector<double> ResolveInstance(const NamedInstance& named,
                                    const std::vector<std::string>& feature_names) {
  std::set<std::string> seen;
  for (const auto& [name, value] : named) {
    if (std::find(feature_names.begin(), feature_names.end(), name) ==
        feature_names.end()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "instance names unknown feature '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "instance repeats feature '" + name + "'");
    }
  }
  std::vector<double> x;
  for (const std::string& feature : feature_names) {
    const auto it = std::find_if(named.begin(), named.end(),
                                 [&](const auto& p) { return p.first == feature; });
    if (it == named.end()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "instance is missing feature '" + feature + "'");
    }
    x.push_back(it->second);
  }
  return x;
}

NamedInstance ParseInstanceSpec(const std::string& text) {
  NamedInstance out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "malformed instance item '" + item + "', expected name=value");
    }
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() ||
        !std::isfinite(v)) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "instance value for '" + name + "' is not a number");
    }
    out.emplace_back(name, v);
    start = end + 1;
  }
  return out;
}

std::uint64_t SplitSeed(const AuditConfig& config) {
  if (config.split_seed_explicit) return config.split.seed;
  return DeriveSeed(config.seed, {StreamTag("split")});
}

std::uint64_t ProtocolSeed(const AuditConfig& config) {
  return DeriveSeed(config.seed, {StreamTag("protocol")});
}

std::uint64_t ExplainSeed(const AuditConfig& config) {
  return DeriveSeed(config.seed, {StreamTag("explain")});
}

}  // namespace mlmaudit
