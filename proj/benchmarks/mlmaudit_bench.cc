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

#include <random>
#include <sstream>
#include <vector>

#include <benchmark/benchmark.h>

#include "mlmaudit/accuracy.h"
#include "mlmaudit/explainers.h"
#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/rng.h"
#include "synthetic_insurance.h"

namespace mlmaudit {
namespace {

ColumnRoles Roles() {
  ColumnRoles roles;
  roles.feature_columns = {"age", "bmi", "children"};
  roles.group_column = "region";
  roles.sensitive_column = "sex";
  roles.sensitive_privileged_value = "male";
  roles.target_column = "charges";
  roles.target_threshold = 6000.0;
  return roles;
}

MlmSpec Spec() {
  MlmSpec spec;
  spec.varying_slope_features = {"age", "bmi"};
  spec.fixed_slope_features = {"children"};
  return spec;
}

const Dataset& Train() {
  static const Dataset train = [] {
    std::istringstream in(synth::InsuranceCsv({1338, 7}));
    return Split(DeriveTarget(ParseCsv(in, Roles()), Roles()), SplitSpec{}).train;
  }();
  return train;
}

void BM_Fit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fit(Train(), Spec()));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

void BM_KernelShap(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Rng rng = MakeRng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  BackgroundSet bg;
  bg.rows.resize(100, static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < bg.rows.size(); ++i) bg.rows.data()[i] = normal(rng);
  std::vector<double> x(m);
  for (double& v : x) v = normal(rng);
  auto f = [](std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
  };
  for (auto _ : state) benchmark::DoNotOptimize(KernelShap(f, x, bg));
}
BENCHMARK(BM_KernelShap)->DenseRange(3, 9, 3)->Unit(benchmark::kMillisecond);

void BM_LinearLime(benchmark::State& state) {
  const MlmModel model = Fit(Train(), Spec());
  LimeConfig config;
  config.perturbation_scale = FeatureStd(Train());
  const std::vector<double> x = {35.0, 40.0, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(LinearLime(ModelLogOdds(model, 1), x, config));
}
BENCHMARK(BM_LinearLime)->Unit(benchmark::kMillisecond);

void BM_AucRoc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = MakeRng(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = unif(rng);
    y[i] = unif(rng) < s[i] ? 1 : 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(AucRoc(y, s));
}
BENCHMARK(BM_AucRoc)->Range(1 << 8, 1 << 16);

}  // namespace
}  // namespace mlmaudit

BENCHMARK_MAIN();
