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

#include "mlmaudit/pipeline.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "mlmaudit/accuracy.h"
#include "mlmaudit/error.h"
#include "mlmaudit/explain_eval.h"
#include "mlmaudit/fairness.h"
#include "mlmaudit/stattests.h"

namespace mlmaudit {
namespace {

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw AuditError(ErrorCode::kIoError, "SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < length; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0')
       << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw AuditError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw AuditError(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MlmModel LoadModel(const std::filesystem::path& path) {
  try {
    return ModelFromJson(nlohmann::json::parse(ReadFile(path)));
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kConfigError,
                     "model '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

MlmModel ObtainModel(const AuditConfig& config, const Dataset& train,
                     const std::optional<std::filesystem::path>& override_path,
                     std::ostream& progress) {
  const auto path = override_path ? override_path : config.model_path;
  if (path) {
    progress << "[audit] importing model " << path->string() << "\n";
    MlmModel model = LoadModel(*path);
    if (model.feature_names != train.feature_names) {
      throw AuditError(ErrorCode::kConfigError,
                       "imported model features do not match the dataset");
    }
    return model;
  }
  progress << "[audit] fitting multilevel logistic model on " << train.num_rows()
           << " rows\n";
  MlmModel model = Fit(train, config.model_spec, config.fit);
  progress << "[audit] fit " << (model.fit_meta.converged ? "converged" : "stopped")
           << " after " << model.fit_meta.iterations << " iterations\n";
  return model;
}

TestResult GuardTest(const std::function<TestResult()>& run, std::size_t n) {
  try {
    return run();
  } catch (const AuditError& e) {
    TestResult t;
    t.statistic = std::nan("");
    t.p_value = std::nan("");
    t.sample_size = n;
    t.notes = std::string(ErrorCodeName(e.code()));
    return t;
  }
}

nlohmann::json NamedJson(const NamedInstance& named) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, value] : named) out[name] = value;
  return out;
}

Dataset Concat(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  const Eigen::Index na = a.features.rows();
  out.features.conservativeResize(na + b.features.rows(), Eigen::NoChange);
  out.features.bottomRows(b.features.rows()) = b.features;
  auto append = [](auto& dst, const auto& src) {
    dst.insert(dst.end(), src.begin(), src.end());
  };
  append(out.group_of_row, b.group_of_row);
  append(out.sensitive, b.sensitive);
  append(out.privileged, b.privileged);
  append(out.raw_target, b.raw_target);
  append(out.target, b.target);
  append(out.row_ids, b.row_ids);
  return out;
}

std::filesystem::path StripReportExtension(std::filesystem::path path) {
  if (path.extension() == ".json" || path.extension() == ".md") {
    path.replace_extension();
  }
  return path;
}

nlohmann::json ReadConfigDocument(const std::string& path) {
  try {
    return nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kConfigError,
                     "config '" + path + "' is not valid JSON: " + e.what());
  }
}

AuditConfig ConfigFromOptions(const CommandOptions& options) {
  if (options.config_path.empty()) {
    throw AuditError(ErrorCode::kConfigError, "--config is required");
  }
  nlohmann::json doc = ReadConfigDocument(options.config_path);
  if (options.seed) {
    if (!doc.is_object()) {
      throw AuditError(ErrorCode::kConfigError, "config must be an object");
    }
    doc["seed"] = *options.seed;
  }
  return ParseConfig(doc, std::filesystem::path(options.config_path).parent_path());
}

template <typename F>
int Guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const AuditError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace

TrainTestSplit PrepareData(const AuditConfig& config) {
  const Dataset raw = LoadCsv(config.dataset.string(), config.roles);
  const Dataset labelled = DeriveTarget(raw, config.roles);
  SplitSpec spec = config.split;
  spec.seed = SplitSeed(config);
  return Split(labelled, spec);
}

AuditRun RunAudit(const AuditConfig& config, std::ostream& progress) {
  AuditRun run;
  progress << "[audit] loading " << config.dataset.string() << "\n";
  TrainTestSplit split = PrepareData(config);
  run.train = std::move(split.train);
  run.test = std::move(split.test);
  progress << "[audit] split " << run.train.num_rows() << " train / "
           << run.test.num_rows() << " test rows over " << run.train.groups.size()
           << " groups\n";
  run.model = ObtainModel(config, run.train, std::nullopt, progress);
  const MlmModel& model = run.model;
  AuditResults& r = run.results;
  r.feature_names = model.feature_names;
  r.groups = model.groups;

  progress << "[audit] statistical properties\n";
  r.vif = Vif(run.train.features, config.vif_mode);
  r.vif_mode = config.vif_mode == VifMode::kCentered ? "centered" : "uncentered";
  const Residuals residuals = ComputeResiduals(model, run.train, config.residual_kind);
  r.residual_kind = std::string(ResidualKindName(config.residual_kind));
  r.swt = GuardTest([&] { return ShapiroWilk(residuals.values); },
                    residuals.values.size());
  r.bpt = GuardTest(
      [&] {
        return BreuschPagan(residuals.values, run.train.features, config.bp_variant);
      },
      residuals.values.size());
  r.random_effects = TestRandomEffectNormality(model, config.random_effect_min_groups);

  progress << "[audit] accuracy\n";
  r.accuracy = PerGroupAccuracy(model, run.test, config.decision_threshold,
                                config.weighted_accuracy);

  progress << "[audit] fairness\n";
  const Dataset slice =
      config.fairness_on_test ? run.test : Concat(run.train, run.test);
  r.group_fairness = ComputeGroupFairness(
      MakeFairnessInput(model, slice, config.decision_threshold), model.groups);
  const SimilaritySpec similarity = SimilaritySpec::FromTraining(
      run.train, config.similarity_delta, config.similarity_excluded);
  r.similarity_delta = config.similarity_delta;
  r.similar_pairs = ScanSimilarPairs(model, slice, similarity);
  r.inter_group = ScanInterGroup(model, slice);
  for (const DiffIndExample& ex : config.diff_ind_examples) {
    const auto a = ResolveInstance(ex.a, model.feature_names);
    const auto b = ResolveInstance(ex.b, model.feature_names);
    const IndividualDiff d = DiffInd(model, a, b, ex.group, similarity);
    r.diff_ind_examples.push_back({{"group", ex.group},
                                   {"a", NamedJson(ex.a)},
                                   {"b", NamedJson(ex.b)},
                                   {"distance", d.distance},
                                   {"similar", d.similar},
                                   {"diff", d.diff}});
  }
  for (const DiffIndMlmExample& ex : config.diff_ind_mlm_examples) {
    const auto x = ResolveInstance(ex.instance, model.feature_names);
    r.diff_ind_mlm_examples.push_back(
        {{"instance", NamedJson(ex.instance)},
         {"group_a", ex.group_a},
         {"group_b", ex.group_b},
         {"diff", DiffIndMlm(model, x, ex.group_a, ex.group_b)}});
  }

  const ProtocolSpec protocol{config.n_instances, config.n_repeats,
                              ProtocolSeed(config)};
  progress << "[audit] explainability: kernel SHAP (" << protocol.n_instances
           << " instances x " << protocol.n_repeats << " repeats per group)\n";
  r.shap_eval = EvaluateExplainer(model, run.train, AttributionMethod::kKernelShap,
                                  protocol, config.explainers);
  progress << "[audit] explainability: linear LIME\n";
  r.lime_eval = EvaluateExplainer(model, run.train, AttributionMethod::kLinearLime,
                                  protocol, config.explainers);
  for (std::size_t i = 0; i < config.explain_instances.size(); ++i) {
    const ExplainInstance& ex = config.explain_instances[i];
    const auto x = ResolveInstance(ex.instance, model.feature_names);
    r.instance_comparisons.push_back(
        ToJson(CompareInstance(model, run.train, x, ex.group, config.explainers,
                               ExplainSeed(config), static_cast<std::int64_t>(i))));
  }

  progress << "[audit] assembling report\n";
  const std::string dataset_bytes = ReadFile(config.dataset);
  nlohmann::json metadata = {
      {"tool_version", kToolVersion},
      {"dataset", config.effective.at("dataset")},
      {"dataset_sha256", Sha256Hex(dataset_bytes)},
      {"config_sha256", Sha256Hex(config.effective.dump())},
      {"seed", config.seed},
      {"split_seed", SplitSeed(config)},
      {"train_rows", run.train.num_rows()},
      {"test_rows", run.test.num_rows()},
      {"fairness_slice", config.fairness_on_test ? "test" : "full"},
      {"decision_threshold", config.decision_threshold},
      {"timestamp", UtcTimestamp()},
  };
  run.report = AssembleReport(r, config.bands, config.annotations, model,
                              std::move(metadata));
  return run;
}

int CmdAudit(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    AuditConfig config = ConfigFromOptions(options);
    if (!options.format.empty()) {
      if (options.format == "json") {
        config.format = OutputFormat::kJson;
      } else if (options.format == "markdown") {
        config.format = OutputFormat::kMarkdown;
      } else if (options.format == "both") {
        config.format = OutputFormat::kBoth;
      } else {
        throw AuditError(ErrorCode::kConfigError,
                         "--format must be json, markdown or both");
      }
    }
    if (!options.out.empty()) config.output = options.out;
    const AuditRun run = RunAudit(config, out);
    const std::filesystem::path base = StripReportExtension(config.output);
    if (config.format != OutputFormat::kMarkdown) {
      std::filesystem::path path = base;
      path += ".json";
      WriteFile(path, RenderJson(run.report));
      out << "[audit] wrote " << path.string() << "\n";
    }
    if (config.format != OutputFormat::kJson) {
      std::filesystem::path path = base;
      path += ".md";
      WriteFile(path, RenderMarkdown(run.report));
      out << "[audit] wrote " << path.string() << "\n";
    }
    const OverallCounts& o = run.report.overall;
    out << "[audit] overall: " << o.red << " red, " << o.amber << " amber, "
        << o.green << " green, " << o.not_scored << " not scored\n";
    if (options.fail_on_red && o.red > 0) {
      err << "red KPIs present (" << o.red << "); failing as requested\n";
      return kExitRedGate;
    }
    return kExitOk;
  });
}

int CmdFit(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const AuditConfig config = ConfigFromOptions(options);
    const TrainTestSplit split = PrepareData(config);
    out << "[audit] fitting multilevel logistic model on " << split.train.num_rows()
        << " rows\n";
    const MlmModel model = Fit(split.train, config.model_spec, config.fit);
    std::filesystem::path path = options.out;
    if (path.empty()) {
      path = StripReportExtension(config.output);
      path += ".model.json";
    }
    WriteFile(path, ModelToJson(model).dump(2) + "\n");
    out << "[audit] fit " << (model.fit_meta.converged ? "converged" : "stopped")
        << " after " << model.fit_meta.iterations << " iterations\n";
    out << "[audit] wrote " << path.string() << "\n";
    return kExitOk;
  });
}

int CmdExplain(const CommandOptions& options, std::ostream& out,
               std::ostream& err) {
  return Guarded(err, [&] {
    const AuditConfig config = ConfigFromOptions(options);
    if (options.instance.empty() || options.group.empty()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "explain needs --instance and --group");
    }
    const TrainTestSplit split = PrepareData(config);
    std::optional<std::filesystem::path> model_path;
    if (!options.model_path.empty()) model_path = options.model_path;
    std::ostringstream progress;
    const MlmModel model = ObtainModel(config, split.train, model_path, progress);
    const auto x =
        ResolveInstance(ParseInstanceSpec(options.instance), model.feature_names);
    const InstanceComparison cmp = CompareInstance(
        model, split.train, x, options.group, config.explainers, ExplainSeed(config));
    const std::string text = ToJson(cmp).dump(2) + "\n";
    if (options.out.empty()) {
      out << text;
    } else {
      WriteFile(options.out, text);
    }
    return kExitOk;
  });
}

}  // namespace mlmaudit
