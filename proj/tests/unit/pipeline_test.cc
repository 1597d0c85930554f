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
#include "mlmaudit/pipeline.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mlmaudit/error.h"

namespace mlmaudit {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using json = nlohmann::json;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const AuditError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no AuditError thrown";
  return ErrorCode::kIoError;
}

std::string DataFile() {
  return std::string(MLMAUDIT_TEST_DATA_DIR) + "/synthetic_insurance.csv";
}

json SmallConfig() {
  json doc = DefaultConfigJson();
  doc["dataset"] = DataFile();
  doc["protocol"]["n_instances"] = 6;
  doc["protocol"]["n_repeats"] = 2;
  doc["explainers"]["lime"]["n_samples"] = 300;
  doc["explainers"]["background_size"] = 30;
  return doc;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("mlmaudit_test_" + std::string(::testing::UnitTest::GetInstance()
                                                ->current_test_info()
                                                ->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  std::string Write(const std::string& name, const json& doc) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << doc.dump(2);
    return p.string();
  }

 private:
  fs::path path_;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ConfigTest, DefaultsParse) {
  const AuditConfig c = ParseConfig(DefaultConfigJson(), "/base");
  EXPECT_EQ(c.dataset, fs::path("/base/data/insurance.csv"));
  EXPECT_EQ(c.roles.feature_columns, (std::vector<std::string>{"age", "bmi", "children"}));
  EXPECT_EQ(c.roles.target_threshold, 6000.0);
  EXPECT_EQ(c.split.test_fraction, 0.05);
  EXPECT_FALSE(c.split_seed_explicit);
  EXPECT_EQ(c.model_spec.varying_slope_features, (std::vector<std::string>{"age", "bmi"}));
  EXPECT_EQ(c.n_instances, 50u);
  EXPECT_EQ(c.n_repeats, 10u);
  EXPECT_EQ(c.vif_mode, VifMode::kUncentered);
  EXPECT_EQ(c.format, OutputFormat::kBoth);
  EXPECT_EQ(c.fit.variance_update, VarianceUpdate::kModeDeviation);
}

TEST(ConfigTest, VarianceUpdateKey) {
  json doc = DefaultConfigJson();
  doc["fit"]["variance_update"] = "laplace_em";
  EXPECT_EQ(ParseConfig(doc).fit.variance_update, VarianceUpdate::kLaplaceEm);
  doc["fit"]["variance_update"] = "reml";
  EXPECT_EQ(CodeOf([&] { ParseConfig(doc); }), ErrorCode::kConfigError);
}

TEST(ConfigTest, RejectsUnknownKeysByPath) {
  json doc = DefaultConfigJson();
  doc["roles"]["featurs"] = json::array({"age"});
  try {
    ParseConfig(doc);
    FAIL();
  } catch (const AuditError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_THAT(e.what(), HasSubstr("roles.featurs"));
  }
  json top = DefaultConfigJson();
  top["sed"] = 1;
  EXPECT_EQ(CodeOf([&] { ParseConfig(top); }), ErrorCode::kConfigError);
  json typed = DefaultConfigJson();
  typed["protocol"]["n_repeats"] = "ten";
  EXPECT_EQ(CodeOf([&] { ParseConfig(typed); }), ErrorCode::kConfigError);
  json bad_rag = DefaultConfigJson();
  bad_rag["annotations"]["model_assumptions_documentation"] = {{"text", "x"}, {"rag", "blue"}};
  EXPECT_EQ(CodeOf([&] { ParseConfig(bad_rag); }), ErrorCode::kConfigError);
}

TEST(ConfigTest, SeedStreams) {
  json doc = DefaultConfigJson();
  doc["seed"] = 5;
  const AuditConfig derived = ParseConfig(doc);
  EXPECT_NE(SplitSeed(derived), ProtocolSeed(derived));
  EXPECT_NE(ProtocolSeed(derived), ExplainSeed(derived));
  doc["split"]["seed"] = 123;
  const AuditConfig explicit_seed = ParseConfig(doc);
  EXPECT_EQ(SplitSeed(explicit_seed), 123u);
  EXPECT_EQ(ProtocolSeed(explicit_seed), ProtocolSeed(derived));
}

TEST(ConfigTest, InstancesResolveByName) {
  const std::vector<std::string> names = {"age", "bmi", "children"};
  EXPECT_EQ(ResolveInstance(ParseInstanceSpec("children=3,age=35,bmi=40"), names),
            (std::vector<double>{35.0, 40.0, 3.0}));
  EXPECT_EQ(CodeOf([&] { ResolveInstance(ParseInstanceSpec("age=35,bmi=40"), names); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] {
              ResolveInstance(ParseInstanceSpec("age=35,bmi=40,children=1,smoker=1"), names);
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] {
              ResolveInstance(ParseInstanceSpec("age=35,age=36,bmi=40,children=1"), names);
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ParseInstanceSpec("age:35"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ParseInstanceSpec("age=old"); }), ErrorCode::kInvalidArgument);
}

TEST(PipelineTest, UnknownKeyExitsWithError) {
  TempDir dir;
  json doc = SmallConfig();
  doc["roles"]["featurs"] = json::array();
  CommandOptions opts;
  opts.config_path = dir.Write("bad.json", doc);
  std::ostringstream out, err;
  EXPECT_EQ(CmdAudit(opts, out, err), kExitError);
  EXPECT_THAT(err.str(), HasSubstr("featurs"));

  opts.config_path = (dir.path() / "missing.json").string();
  std::ostringstream err2;
  EXPECT_EQ(CmdAudit(opts, out, err2), kExitError);
}

TEST(PipelineTest, AuditWritesReportsAndIsDeterministic) {
  TempDir dir;
  json doc = SmallConfig();
  doc["output"]["path"] = (dir.path() / "run1/report").string();
  CommandOptions opts;
  opts.config_path = dir.Write("cfg.json", doc);
  std::ostringstream out, err;
  ASSERT_EQ(CmdAudit(opts, out, err), kExitOk) << err.str();
  EXPECT_THAT(out.str(), HasSubstr("[audit] overall:"));
  const fs::path json1 = dir.path() / "run1/report.json";
  ASSERT_TRUE(fs::exists(json1));
  ASSERT_TRUE(fs::exists(dir.path() / "run1/report.md"));

  opts.out = (dir.path() / "run2/report.json").string();
  opts.format = "json";
  std::ostringstream out2;
  ASSERT_EQ(CmdAudit(opts, out2, err), kExitOk) << err.str();
  EXPECT_FALSE(fs::exists(dir.path() / "run2/report.md"));
  const AuditReport a = ReportFromJson(json::parse(Slurp(json1)));
  const AuditReport b = ReportFromJson(json::parse(Slurp(dir.path() / "run2/report.json")));
  EXPECT_EQ(ReportBody(a).dump(), ReportBody(b).dump());
  EXPECT_EQ(a.metadata.at("config_sha256"), b.metadata.at("config_sha256"));
  EXPECT_EQ(a.metadata.at("dataset_sha256").get<std::string>().size(), 64u);

  opts.seed = 99;
  opts.out = (dir.path() / "run3/report").string();
  std::ostringstream out3;
  ASSERT_EQ(CmdAudit(opts, out3, err), kExitOk) << err.str();
  const AuditReport c = ReportFromJson(json::parse(Slurp(dir.path() / "run3/report.json")));
  EXPECT_EQ(c.metadata.at("seed"), 99);
  EXPECT_NE(a.metadata.at("config_sha256"), c.metadata.at("config_sha256"));

  opts.format = "yaml";
  std::ostringstream err4;
  EXPECT_EQ(CmdAudit(opts, out3, err4), kExitError);
}

TEST(PipelineTest, FailOnRedGate) {
  TempDir dir;
  json doc = SmallConfig();
  doc["output"]["path"] = (dir.path() / "r").string();
  CommandOptions opts;
  opts.config_path = dir.Write("cfg.json", doc);
  opts.fail_on_red = true;
  std::ostringstream out, err;
  EXPECT_EQ(CmdAudit(opts, out, err), kExitRedGate);
  EXPECT_THAT(err.str(), HasSubstr("red"));
}

TEST(PipelineTest, FitThenExplainWithImportedModel) {
  TempDir dir;
  json doc = SmallConfig();
  doc["output"]["path"] = (dir.path() / "audit").string();
  CommandOptions opts;
  opts.config_path = dir.Write("cfg.json", doc);
  std::ostringstream out, err;
  ASSERT_EQ(CmdFit(opts, out, err), kExitOk) << err.str();
  const fs::path model_file = dir.path() / "audit.model.json";
  ASSERT_TRUE(fs::exists(model_file));

  opts.instance = "age=35,bmi=40,children=3";
  opts.group = "northwest";
  std::ostringstream fitted;
  ASSERT_EQ(CmdExplain(opts, fitted, err), kExitOk) << err.str();
  opts.model_path = model_file.string();
  std::ostringstream imported;
  ASSERT_EQ(CmdExplain(opts, imported, err), kExitOk) << err.str();
  EXPECT_EQ(fitted.str(), imported.str());
  const json j = json::parse(imported.str());
  EXPECT_EQ(j.at("group"), "northwest");

  opts.instance = "age=0,bmi=0,children=0";
  std::ostringstream zeros;
  EXPECT_EQ(CmdExplain(opts, zeros, err), kExitOk) << err.str();

  opts.instance = "age=35,bmi=40";
  std::ostringstream missing, missing_err;
  EXPECT_EQ(CmdExplain(opts, missing, missing_err), kExitError);
  EXPECT_THAT(missing_err.str(), HasSubstr("children"));

  opts.instance = "age=35,bmi=40,children=3";
  opts.group = "atlantis";
  std::ostringstream unknown, unknown_err;
  EXPECT_EQ(CmdExplain(opts, unknown, unknown_err), kExitError);

  opts.instance.clear();
  std::ostringstream none, none_err;
  EXPECT_EQ(CmdExplain(opts, none, none_err), kExitError);
}

}  // namespace
}  // namespace mlmaudit
