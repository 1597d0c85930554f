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

#ifndef MLMAUDIT_TESTS_ORACLES_COUNTING_ORACLE_H_
#define MLMAUDIT_TESTS_ORACLES_COUNTING_ORACLE_H_

#include <cmath>
#include <cstddef>
#include <vector>

namespace mlmaudit::oracle {

// AUC as the share of (positive, negative) pairs ranked correctly, ties
// counting one half.
inline double PairCountAuc(const std::vector<int>& y,
                           const std::vector<double>& s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

struct SideTally {
  int rows = 0;
  int predicted_positive = 0;
  int positives = 0;
  int negatives = 0;
  int true_positive = 0;
  int false_positive = 0;
};

// side 1 = privileged.
inline SideTally Tally(const std::vector<int>& y_true,
                       const std::vector<int>& y_pred,
                       const std::vector<int>& privileged, int side) {
  SideTally t;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    if (privileged[i] != side) continue;
    ++t.rows;
    if (y_pred[i] == 1) ++t.predicted_positive;
    if (y_true[i] == 1) {
      ++t.positives;
      if (y_pred[i] == 1) ++t.true_positive;
    } else {
      ++t.negatives;
      if (y_pred[i] == 1) ++t.false_positive;
    }
  }
  return t;
}

inline double Rate(int num, int den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

// Mid-ranks by direct counting: #greater + (#equal + 1) / 2.
inline std::vector<double> AverageRanksDescending(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double greater = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] > v[i]) greater += 1.0;
      if (v[j] == v[i]) equal += 1.0;
    }
    r[i] = greater + (equal + 1.0) / 2.0;
  }
  return r;
}

inline double PearsonOf(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  return (n * sab - sa * sb) /
         std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

}  // namespace mlmaudit::oracle

#endif  // MLMAUDIT_TESTS_ORACLES_COUNTING_ORACLE_H_
