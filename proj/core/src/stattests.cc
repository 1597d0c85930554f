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

#include "mlmaudit/stattests.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "mlmaudit/error.h"
#include "mlmaudit/special_functions.h"

namespace mlmaudit {
namespace {

template <std::size_t N>
double Poly(const std::array<double, N>& c, double x) {
  double result = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) result = result * x + c[i];
  return result;
}

// Residual sum of squares of y regressed on x by least squares.
double LeastSquaresRss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
  return (y - x * coef).squaredNorm();
}

}  // namespace

VifResult Vif(const Eigen::MatrixXd& features, VifMode mode) {
  const Eigen::Index n = features.rows();
  const Eigen::Index m = features.cols();
  if (m < 2) {
    throw AuditError(ErrorCode::kInvalidArgument, "VIF needs at least 2 features");
  }
  if (n <= m + 1) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "VIF needs more rows than features + 1");
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    if (features.col(k).maxCoeff() == features.col(k).minCoeff()) {
      throw AuditError(ErrorCode::kConstantColumn,
                       "feature column " + std::to_string(k) + " is constant");
    }
  }
  const bool centered = mode == VifMode::kCentered;
  VifResult out;
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::MatrixXd others(n, m - 1 + (centered ? 1 : 0));
    Eigen::Index c = 0;
    if (centered) others.col(c++).setOnes();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != k) others.col(c++) = features.col(j);
    }
    const Eigen::VectorXd y = features.col(k);
    const double rss = LeastSquaresRss(others, y);
    const double tss = centered ? (y.array() - y.mean()).square().sum()
                                : y.squaredNorm();
    const double r2 = 1.0 - rss / tss;
    if (r2 >= 1.0 - 1e-12) {
      out.values.push_back(std::numeric_limits<double>::infinity());
      out.perfect_collinearity.push_back(true);
    } else {
      out.values.push_back(1.0 / (1.0 - std::max(r2, 0.0)));
      out.perfect_collinearity.push_back(false);
    }
  }
  return out;
}

TestResult ShapiroWilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) {
    throw AuditError(ErrorCode::kSampleTooSmall,
                     "Shapiro-Wilk needs at least 3 values, got " + std::to_string(n));
  }
  if (n > 5000) {
    throw AuditError(ErrorCode::kSampleTooLarge,
                     "Shapiro-Wilk supports at most 5000 values, got " +
                         std::to_string(n) + "; subsample explicitly");
  }
  std::vector<double> x(sample.begin(), sample.end());
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw AuditError(ErrorCode::kInvalidArgument, "sample has a non-finite value");
    }
  }
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() <= 1e-19 * std::max(1.0, std::abs(x.front()))) {
    throw AuditError(ErrorCode::kConstantSample, "sample is constant");
  }

  // Coefficients a[1..n/2] (Royston 1995).
  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half + 1, 0.0);
  if (n == 3) {
    a[1] = std::numbers::sqrt2 / 2.0;
  } else {
    static constexpr std::array<double, 6> kC1 = {0.0, 0.221157, -0.147981,
                                                  -2.071190, 4.434685, -2.706056};
    static constexpr std::array<double, 6> kC2 = {0.0, 0.042981, -0.293762,
                                                  -1.752461, 5.682633, -3.582633};
    double summ2 = 0.0;
    for (std::size_t i = 1; i <= half; ++i) {
      a[i] = special::NormalQuantile((static_cast<double>(i) - 0.375) / (an + 0.25));
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = Poly(kC1, rsn) - a[1] / ssumm2;
    std::size_t first;
    double fac;
    if (n > 5) {
      first = 3;
      const double a2 = -a[2] / ssumm2 + Poly(kC2, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[1] * a[1] - 2.0 * a[2] * a[2]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[2] = a2;
    } else {
      first = 2;
      fac = std::sqrt((summ2 - 2.0 * a[1] * a[1]) / (1.0 - 2.0 * a1 * a1));
    }
    a[1] = a1;
    for (std::size_t i = first; i <= half; ++i) a[i] /= -fac;
  }

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= an;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  double numerator = 0.0;
  for (std::size_t i = 1; i <= half; ++i) {
    numerator += a[i] * (x[n - i] - x[i - 1]);
  }
  const double w = std::min(1.0, numerator * numerator / ss);

  TestResult out;
  out.statistic = w;
  out.sample_size = n;
  if (n == 3) {
    constexpr double kSixOverPi = 6.0 / std::numbers::pi;
    constexpr double kPiOverThree = std::numbers::pi / 3.0;
    out.p_value = std::clamp(
        kSixOverPi * (std::asin(std::sqrt(w)) - kPiOverThree), 0.0, 1.0);
    return out;
  }
  double y = std::log1p(-w);
  double m;
  double s;
  if (n <= 11) {
    const double gamma = -2.273 + 0.459 * an;
    if (y >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    m = Poly(std::array<double, 4>{0.544, -0.39978, 0.025054, -6.714e-4}, an);
    s = std::exp(
        Poly(std::array<double, 4>{1.3822, -0.77857, 0.062767, -0.0020322}, an));
  } else {
    const double ln = std::log(an);
    m = Poly(std::array<double, 4>{-1.5861, -0.31082, -0.083751, 0.0038915}, ln);
    s = std::exp(Poly(std::array<double, 3>{-0.4803, -0.082676, 0.0030302}, ln));
  }
  out.p_value = std::clamp(special::NormalSf((y - m) / s), 0.0, 1.0);
  return out;
}

TestResult BreuschPagan(std::span<const double> residuals,
                        const Eigen::MatrixXd& design,
                        BreuschPaganVariant variant) {
  const auto n = static_cast<Eigen::Index>(residuals.size());
  if (n != design.rows()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "residual count does not match design rows");
  }
  if (design.cols() < 1) {
    throw AuditError(ErrorCode::kInvalidArgument, "design has no regressors");
  }
  Eigen::MatrixXd x(n, design.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(design.cols()) = design;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < x.cols()) {
    throw AuditError(ErrorCode::kRankDeficientDesign,
                     "design with intercept has rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(x.cols()));
  }

  TestResult out;
  out.sample_size = static_cast<std::size_t>(n);
  const double dof = static_cast<double>(design.cols());
  Eigen::VectorXd e2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e2[i] = residuals[static_cast<std::size_t>(i)] * residuals[static_cast<std::size_t>(i)];
  }
  const double mean = e2.mean();
  const double tss = (e2.array() - mean).square().sum();
  if (!(tss > 1e-24 * std::max(1.0, mean * mean) * static_cast<double>(n))) {
    out.statistic = 0.0;
    out.p_value = 1.0;
    out.notes = "squared residuals have zero variance";
    return out;
  }
  Eigen::VectorXd target = e2;
  if (variant == BreuschPaganVariant::kClassic) target /= mean;
  const Eigen::VectorXd fitted = x * qr.solve(target);
  const double target_mean = target.mean();
  if (variant == BreuschPaganVariant::kClassic) {
    out.statistic = 0.5 * (fitted.array() - target_mean).square().sum();
  } else {
    const double rss = (target - fitted).squaredNorm();
    const double total = (target.array() - target_mean).square().sum();
    out.statistic = static_cast<double>(n) * (1.0 - rss / total);
  }
  out.statistic = std::max(out.statistic, 0.0);
  out.p_value = std::clamp(special::ChiSquareSf(out.statistic, dof), 0.0, 1.0);
  return out;
}

RandomEffectNormality TestRandomEffectNormality(const MlmModel& model,
                                                std::size_t min_groups) {
  RandomEffectNormality out;
  out.num_groups = model.groups.size();
  if (out.num_groups < min_groups) {
    out.insufficient_groups = true;
    return out;
  }
  auto run = [&](std::string name, const std::vector<double>& values) {
    TestResult result;
    try {
      result = ShapiroWilk(values);
    } catch (const AuditError& e) {
      result.sample_size = values.size();
      result.notes = std::string(ErrorCodeName(e.code()));
    }
    out.effects.emplace_back(std::move(name), result);
  };
  if (model.varying_intercept) run("alpha", model.alpha);
  for (std::size_t v = 0; v < model.varying_features.size(); ++v) {
    std::vector<double> values;
    for (const auto& row : model.beta_varying) values.push_back(row[v]);
    run("beta[" +
            model.feature_names[static_cast<std::size_t>(model.varying_features[v])] +
            "]",
        values);
  }
  return out;
}

}  // namespace mlmaudit
