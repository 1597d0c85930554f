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

#ifndef MLMAUDIT_TESTS_ORACLES_LOGISTIC_ORACLE_H_
#define MLMAUDIT_TESTS_ORACLES_LOGISTIC_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "linalg_oracle.h"

namespace mlmaudit::oracle {

// Unpenalized logistic regression by plain Newton-Raphson. Row i of `x`
// already contains the intercept column if one is wanted.
inline std::vector<double> LogisticNewton(const Matrix& x,
                                          const std::vector<int>& y,
                                          int iterations = 100) {
  const std::size_t p = x[0].size();
  std::vector<double> beta(p, 0.0);
  for (int it = 0; it < iterations; ++it) {
    Matrix hess(p, std::vector<double>(p, 0.0));
    std::vector<double> grad(p, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double eta = 0.0;
      for (std::size_t c = 0; c < p; ++c) eta += beta[c] * x[i][c];
      const double prob = 1.0 / (1.0 + std::exp(-eta));
      const double w = prob * (1.0 - prob);
      for (std::size_t a = 0; a < p; ++a) {
        grad[a] += (y[i] - prob) * x[i][a];
        for (std::size_t b = 0; b < p; ++b) hess[a][b] += w * x[i][a] * x[i][b];
      }
    }
    const std::vector<double> step = Solve(hess, grad);
    double size = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      beta[c] += step[c];
      size = std::max(size, std::abs(step[c]));
    }
    if (size < 1e-13) break;
  }
  return beta;
}

}  // namespace mlmaudit::oracle

#endif  // MLMAUDIT_TESTS_ORACLES_LOGISTIC_ORACLE_H_
