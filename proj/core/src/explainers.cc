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

#include "mlmaudit/explainers.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "mlmaudit/error.h"
#include "mlmaudit/rng.h"

namespace mlmaudit {

BlackBox ModelLogOdds(const MlmModel& model, int group) {
  if (group < 0 || static_cast<std::size_t>(group) >= model.groups.size()) {
    throw AuditError(ErrorCode::kUnknownGroup, "group index out of range");
  }
  const double alpha = model.alpha[static_cast<std::size_t>(group)];
  std::vector<double> slopes = model.Slopes(group);
  return [alpha, slopes = std::move(slopes)](std::span<const double> x) {
    if (x.size() != slopes.size()) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "instance size does not match the model");
    }
    double eta = alpha;
    for (std::size_t k = 0; k < slopes.size(); ++k) eta += slopes[k] * x[k];
    return eta;
  };
}

BackgroundSet SampleBackground(const Dataset& train, int group,
                               std::size_t max_rows, std::uint64_t seed) {
  if (group < 0 || static_cast<std::size_t>(group) >= train.groups.size()) {
    throw AuditError(ErrorCode::kUnknownGroup, "group index out of range");
  }
  const std::vector<std::size_t> rows = train.RowsInGroup(group);
  if (rows.empty() || max_rows == 0) {
    throw AuditError(ErrorCode::kDegenerateBackground,
                     "no background rows for group '" +
                         train.groups[static_cast<std::size_t>(group)] + "'");
  }
  std::vector<std::size_t> chosen;
  if (rows.size() <= max_rows) {
    chosen = rows;
  } else {
    Rng rng = MakeRng(seed);
    std::sample(rows.begin(), rows.end(), std::back_inserter(chosen), max_rows,
                rng);
  }
  BackgroundSet bg;
  bg.seed = seed;
  bg.rows.resize(static_cast<Eigen::Index>(chosen.size()), train.features.cols());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    bg.rows.row(static_cast<Eigen::Index>(i)) =
        train.features.row(static_cast<Eigen::Index>(chosen[i]));
  }
  return bg;
}

Attribution KernelShap(const BlackBox& f, std::span<const double> x,
                       const BackgroundSet& background) {
  const std::size_t m = x.size();
  if (m > kMaxExactShapFeatures) {
    throw AuditError(ErrorCode::kTooManyFeatures,
                     "exact Kernel SHAP supports at most 15 features, got " +
                         std::to_string(m));
  }
  if (background.rows.rows() == 0) {
    throw AuditError(ErrorCode::kDegenerateBackground, "background set is empty");
  }
  if (static_cast<std::size_t>(background.rows.cols()) != m || m == 0) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "background width does not match the instance");
  }

  // v(S) = mean over background rows of f with features in S taken from x.
  const std::uint32_t full = (1u << m) - 1u;
  std::vector<double> value(static_cast<std::size_t>(full) + 1);
  std::vector<double> z(m);
  const Eigen::Index nbg = background.rows.rows();
  for (std::uint32_t s = 0; s <= full; ++s) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < nbg; ++r) {
      for (std::size_t k = 0; k < m; ++k) {
        z[k] = (s >> k) & 1u ? x[k] : background.rows(r, static_cast<Eigen::Index>(k));
      }
      sum += f(z);
    }
    value[s] = sum / static_cast<double>(nbg);
  }

  Attribution out;
  out.method = AttributionMethod::kKernelShap;
  out.instance.assign(x.begin(), x.end());
  out.base = value[0];
  const double total = value[full] - value[0];
  out.contributions.assign(m, 0.0);
  if (m == 1) {
    out.contributions[0] = total;
    return out;
  }

  // Eliminate the last coefficient through the efficiency constraint and
  // solve the remaining weighted least squares.
  std::vector<double> binom(m + 1, 1.0);
  for (std::size_t k = 1; k <= m; ++k) {
    binom[k] = binom[k - 1] * static_cast<double>(m - k + 1) / static_cast<double>(k);
  }
  const auto rows = static_cast<Eigen::Index>(full - 1);
  const auto cols = static_cast<Eigen::Index>(m - 1);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  Eigen::Index row = 0;
  for (std::uint32_t s = 1; s < full; ++s, ++row) {
    const auto size = static_cast<std::size_t>(std::popcount(s));
    const double weight =
        static_cast<double>(m - 1) /
        (binom[size] * static_cast<double>(size) * static_cast<double>(m - size));
    const double sw = std::sqrt(weight);
    const double last = (s >> (m - 1)) & 1u ? 1.0 : 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double in = (s >> k) & 1u ? 1.0 : 0.0;
      a(row, static_cast<Eigen::Index>(k)) = sw * (in - last);
    }
    b[row] = sw * (value[s] - value[0] - last * total);
  }
  const Eigen::VectorXd phi = a.colPivHouseholderQr().solve(b);
  double rest = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    out.contributions[k] = phi[static_cast<Eigen::Index>(k)];
    rest += out.contributions[k];
  }
  out.contributions[m - 1] = total - rest;
  return out;
}

Attribution LinearLime(const BlackBox& f, std::span<const double> x,
                       const LimeConfig& config) {
  const std::size_t m = x.size();
  if (config.perturbation_scale.size() != m || m == 0) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "LIME needs one perturbation scale per feature");
  }
  if (config.n_samples < 10 * m) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "LIME needs n_samples >= 10 * features");
  }
  const double width =
      config.kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(m)));
  if (!(width > 0.0) || !(config.ridge_lambda >= 0.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "LIME needs kernel_width > 0 and ridge_lambda >= 0");
  }
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < m; ++k) {
    const double s = config.perturbation_scale[k];
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw AuditError(ErrorCode::kInvalidArgument,
                       "perturbation scales must be finite and >= 0");
    }
    if (s > 0.0) active.push_back(k);
  }

  Attribution out;
  out.method = AttributionMethod::kLinearLime;
  out.instance.assign(x.begin(), x.end());
  out.contributions.assign(m, 0.0);
  out.slopes.assign(m, 0.0);

  const auto n = static_cast<Eigen::Index>(config.n_samples);
  const auto p = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd target(n);
  Eigen::VectorXd weight(n);
  Rng rng = MakeRng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(x.begin(), x.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    double d2 = 0.0;
    design(i, 0) = 1.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      const std::size_t k = active[static_cast<std::size_t>(c)];
      const double e = normal(rng);
      z[k] = x[k] + e * config.perturbation_scale[k];
      d2 += e * e;
      design(i, c + 1) = z[k];
    }
    target[i] = f(z);
    weight[i] = std::exp(-d2 / (width * width));
  }
  if (!(weight.maxCoeff() >= 1e-12)) {
    throw AuditError(ErrorCode::kDegenerateWeights,
                     "all LIME kernel weights are below 1e-12");
  }

  Eigen::MatrixXd gram = design.transpose() * weight.asDiagonal() * design;
  for (Eigen::Index c = 1; c <= p; ++c) gram(c, c) += config.ridge_lambda;
  const Eigen::VectorXd rhs = design.transpose() * weight.asDiagonal() * target;
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);

  out.base = coef[0];
  for (Eigen::Index c = 0; c < p; ++c) {
    const std::size_t k = active[static_cast<std::size_t>(c)];
    out.slopes[k] = coef[c + 1];
    out.contributions[k] = coef[c + 1] * x[k];
  }
  return out;
}

std::vector<double> FeatureStd(const Dataset& train) {
  std::vector<double> out;
  const double n = static_cast<double>(train.num_rows());
  for (Eigen::Index k = 0; k < train.features.cols(); ++k) {
    if (train.num_rows() < 2) {
      out.push_back(0.0);
      continue;
    }
    const auto col = train.features.col(k);
    const double mean = col.mean();
    out.push_back(std::sqrt((col.array() - mean).square().sum() / (n - 1.0)));
  }
  return out;
}

}  // namespace mlmaudit
