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

#ifndef MLMAUDIT_TESTS_UNIT_TEST_UTIL_H_
#define MLMAUDIT_TESTS_UNIT_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlmaudit/ingest.h"
#include "mlmaudit/mlm.h"
#include "mlmaudit/rng.h"
#include "synthetic_insurance.h"

namespace mlmaudit::testing {

inline ColumnRoles InsuranceRoles() {
  ColumnRoles roles;
  roles.feature_columns = {"age", "bmi", "children"};
  roles.group_column = "region";
  roles.sensitive_column = "sex";
  roles.sensitive_privileged_value = "male";
  roles.target_column = "charges";
  roles.target_threshold = 6000.0;
  return roles;
}

inline MlmSpec InsuranceSpec() {
  MlmSpec spec;
  spec.varying_intercept = true;
  spec.varying_slope_features = {"age", "bmi"};
  spec.fixed_slope_features = {"children"};
  return spec;
}

inline Dataset SyntheticInsurance(std::uint64_t seed, std::size_t rows = 1338) {
  std::istringstream in(synth::InsuranceCsv({rows, seed}));
  return DeriveTarget(ParseCsv(in, InsuranceRoles(), "synthetic"),
                      InsuranceRoles());
}

inline TrainTestSplit SyntheticInsuranceSplit(std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  return Split(SyntheticInsurance(seed), spec);
}

// Grouped logistic data with known coefficients. Group j has intercept
// alpha[j] and slopes beta[j]; features are N(means[k], sds[k]).
struct LogitDesign {
  std::vector<double> alpha;
  std::vector<std::vector<double>> beta;
  std::vector<double> means;
  std::vector<double> sds;
  std::size_t rows_per_group = 200;
};

inline Dataset SyntheticLogit(const LogitDesign& design, std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t groups = design.alpha.size();
  const std::size_t m = design.means.size();
  const std::size_t n = groups * design.rows_per_group;
  Dataset ds;
  for (std::size_t k = 0; k < m; ++k) ds.feature_names.push_back("x" + std::to_string(k));
  ds.header = ds.feature_names;
  ds.header.insert(ds.header.end(), {"g", "s", "y"});
  for (std::size_t j = 0; j < groups; ++j) ds.groups.push_back("g" + std::to_string(j));
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i / design.rows_per_group;
    double eta = design.alpha[j];
    for (std::size_t k = 0; k < m; ++k) {
      const double v = design.means[k] + design.sds[k] * normal(rng);
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
      eta += design.beta[j][k] * v;
    }
    const int y = unif(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
    const int s = unif(rng) < 0.5 ? 1 : 0;
    ds.group_of_row.push_back(static_cast<int>(j));
    ds.sensitive.push_back(s ? "p" : "u");
    ds.privileged.push_back(s);
    ds.raw_target.push_back(std::to_string(y));
    ds.target.push_back(y);
    ds.row_ids.push_back(i);
  }
  return ds;
}

inline MlmSpec AllVarying(std::size_t m) {
  MlmSpec spec;
  for (std::size_t k = 0; k < m; ++k) {
    spec.varying_slope_features.push_back("x" + std::to_string(k));
  }
  return spec;
}

}  // namespace mlmaudit::testing

#endif  // MLMAUDIT_TESTS_UNIT_TEST_UTIL_H_
