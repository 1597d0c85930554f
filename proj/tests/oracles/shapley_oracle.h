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

#ifndef MLMAUDIT_TESTS_ORACLES_SHAPLEY_ORACLE_H_
#define MLMAUDIT_TESTS_ORACLES_SHAPLEY_ORACLE_H_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace mlmaudit::oracle {

// v(S) = mean over background rows of f(x_S, bg_notS).
inline double CoalitionValue(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<std::vector<double>>& bg,
    const std::vector<bool>& in_coalition) {
  double sum = 0.0;
  for (const auto& row : bg) {
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = in_coalition[k] ? x[k] : row[k];
    sum += f(z);
  }
  return sum / static_cast<double>(bg.size());
}

// Shapley values as the average marginal contribution over all M!
// orderings of the features.
inline std::vector<double> PermutationShapley(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<std::vector<double>>& bg) {
  const std::size_t m = x.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(m, 0.0);
  std::size_t count = 0;
  do {
    std::vector<bool> in(m, false);
    double previous = CoalitionValue(f, x, bg, in);
    for (std::size_t k : order) {
      in[k] = true;
      const double next = CoalitionValue(f, x, bg, in);
      phi[k] += next - previous;
      previous = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= static_cast<double>(count);
  return phi;
}

}  // namespace mlmaudit::oracle

#endif  // MLMAUDIT_TESTS_ORACLES_SHAPLEY_ORACLE_H_
