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

#include "synthetic_insurance.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "mlmaudit/rng.h"

namespace mlmaudit::synth {

void WriteInsuranceCsv(std::ostream& out, const InsuranceOptions& options) {
  static constexpr std::array<const char*, 4> kRegions = {
      "northeast", "northwest", "southeast", "southwest"};
  // Regional shifts of the charge level and of the BMI mean.
  static constexpr std::array<double, 4> kRegionCharge = {500.0, 200.0, -400.0,
                                                          -300.0};
  static constexpr std::array<double, 4> kRegionBmi = {-1.3, -1.4, 2.6, 0.0};
  static constexpr std::array<double, 4> kRegionAgeSlope = {0.0, 6.0, -8.0,
                                                            3.0};
  static constexpr std::array<double, 6> kChildren = {574, 324, 240, 157, 25, 18};

  Rng rng = MakeRng(DeriveSeed(options.seed, {StreamTag("synthetic_insurance")}));
  std::uniform_int_distribution<int> age_dist(18, 64);
  std::uniform_int_distribution<int> region_dist(0, 3);
  std::bernoulli_distribution male(0.505);
  std::bernoulli_distribution smoker(0.205);
  std::bernoulli_distribution surcharge(0.12);
  std::discrete_distribution<int> children_dist(kChildren.begin(), kChildren.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> tail(1.0 / 800.0);

  out << "age,sex,bmi,children,smoker,region,charges\n";
  char buf[160];
  for (std::size_t i = 0; i < options.rows; ++i) {
    const int age = age_dist(rng);
    const int region = region_dist(rng);
    const bool is_male = male(rng);
    const bool is_smoker = smoker(rng);
    const int children = children_dist(rng);
    const double bmi = std::clamp(
        30.4 + kRegionBmi[static_cast<std::size_t>(region)] + 5.9 * normal(rng),
        16.0, 53.1);
    double charges = (275.0 + kRegionAgeSlope[static_cast<std::size_t>(region)]) * age -
                     3900.0 + 20.0 * (bmi - 30.0) + 480.0 * children +
                     kRegionCharge[static_cast<std::size_t>(region)] +
                     tail(rng) + 400.0 * normal(rng);
    if (surcharge(rng)) charges += 7000.0 + 4000.0 * std::abs(normal(rng));
    if (is_smoker) {
      charges += 13000.0 + 1450.0 * (bmi - 30.0) + (bmi > 30.0 ? 19500.0 : 0.0);
    }
    charges = std::max(charges, 1121.87 + 200.0 * std::abs(normal(rng)));
    std::snprintf(buf, sizeof(buf), "%d,%s,%.3f,%d,%s,%s,%.5f\n", age,
                  is_male ? "male" : "female", bmi, children,
                  is_smoker ? "yes" : "no",
                  kRegions[static_cast<std::size_t>(region)], charges);
    out << buf;
  }
}

std::string InsuranceCsv(const InsuranceOptions& options) {
  std::ostringstream os;
  WriteInsuranceCsv(os, options);
  return os.str();
}

}  // namespace mlmaudit::synth
