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

#ifndef MLMAUDIT_TOOLS_SYNTHETIC_INSURANCE_H_
#define MLMAUDIT_TOOLS_SYNTHETIC_INSURANCE_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>

namespace mlmaudit::synth {

struct InsuranceOptions {
  std::size_t rows = 1338;
  std::uint64_t seed = 0;
};

// Writes a CSV with the columns age,sex,bmi,children,smoker,region,charges.
// Marginals roughly follow the public US health-insurance table: uniform
// adult ages, BMI around 30, few children, one smoker in five, four regions
// and right-skewed charges that rise with age and, for smokers, with BMI.
void WriteInsuranceCsv(std::ostream& out, const InsuranceOptions& options);

std::string InsuranceCsv(const InsuranceOptions& options);

}  // namespace mlmaudit::synth

#endif  // MLMAUDIT_TOOLS_SYNTHETIC_INSURANCE_H_
