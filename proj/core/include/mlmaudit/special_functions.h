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

#ifndef MLMAUDIT_SPECIAL_FUNCTIONS_H_
#define MLMAUDIT_SPECIAL_FUNCTIONS_H_

// Distribution functions used by the hypothesis tests. Accuracy target is
// 1e-10 absolute on the ranges the tests visit.

namespace mlmaudit::special {

double Sigmoid(double log_odds);

// Standard normal lower-tail CDF.
double NormalCdf(double z);
// Standard normal upper-tail probability, accurate far into the tail.
double NormalSf(double z);
// Inverse standard normal CDF (Wichura AS 241, ~1e-16 relative).
double NormalQuantile(double p);

// Regularized lower / upper incomplete gamma functions P(a, x), Q(a, x).
double RegularizedGammaP(double a, double x);
double RegularizedGammaQ(double a, double x);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double ChiSquareSf(double statistic, double dof);

}  // namespace mlmaudit::special

#endif  // MLMAUDIT_SPECIAL_FUNCTIONS_H_
