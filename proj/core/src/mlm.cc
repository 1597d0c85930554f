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

#include "mlmaudit/mlm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "mlmaudit/error.h"
#include "mlmaudit/special_functions.h"

namespace mlmaudit {
namespace {

// Parameter layout of the fit. Group j owns a block of `per_group`
// coefficients [alpha_j?, beta_j over varying features]; after the blocks
// come the shared coefficients [intercept if not varying, fixed slopes].
struct Layout {
  int num_groups = 0;
  bool varying_intercept = true;
  std::vector<int> varying;
  std::vector<int> fixed;

  int per_group() const {
    return (varying_intercept ? 1 : 0) + static_cast<int>(varying.size());
  }
  int shared() const {
    return (varying_intercept ? 0 : 1) + static_cast<int>(fixed.size());
  }
  int size() const { return num_groups * per_group() + shared(); }
  int GroupCoef(int group, int c) const { return group * per_group() + c; }
  int SharedCoef(int c) const { return num_groups * per_group() + c; }

  // Feature index of group-block component c, or -1 for the intercept.
  int ComponentFeature(int c) const {
    if (varying_intercept) return c == 0 ? -1 : varying[c - 1];
    return varying[c];
  }
};

double Softplus(double eta) {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

class PenalizedLogit {
 public:
  PenalizedLogit(const Layout& layout, const Eigen::MatrixXd& design,
                 const Eigen::VectorXd& y, std::vector<int> group_of_row)
      : layout_(layout), x_(design), y_(y), group_(std::move(group_of_row)) {}

  // precision[c] = 1 / sigma2 of group-block component c (scaled units).
  void set_precision(std::vector<double> precision) {
    precision_ = std::move(precision);
  }

  double Objective(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd eta = x_ * theta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      ll += y_[i] * eta[i] - Softplus(eta[i]);
    }
    return ll - Penalty(theta);
  }

  double Penalty(const Eigen::VectorXd& theta) const {
    double pen = 0.0;
    const int q = layout_.per_group();
    for (int c = 0; c < q; ++c) {
      const double mean = ComponentMean(theta, c);
      double ss = 0.0;
      for (int j = 0; j < layout_.num_groups; ++j) {
        const double d = theta[layout_.GroupCoef(j, c)] - mean;
        ss += d * d;
      }
      pen += 0.5 * precision_[c] * ss;
    }
    return pen;
  }

  double ComponentMean(const Eigen::VectorXd& theta, int c) const {
    double sum = 0.0;
    for (int j = 0; j < layout_.num_groups; ++j) {
      sum += theta[layout_.GroupCoef(j, c)];
    }
    return sum / layout_.num_groups;
  }

  // Gradient and negative Hessian of the objective.
  void Derivatives(const Eigen::VectorXd& theta, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    const int q = layout_.per_group();
    const int groups = layout_.num_groups;
    const Eigen::VectorXd eta = x_ * theta;
    Eigen::VectorXd resid(eta.size());
    Eigen::VectorXd weight(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double prob = special::Sigmoid(eta[i]);
      resid[i] = y_[i] - prob;
      weight[i] = prob * (1.0 - prob);
    }
    grad = x_.transpose() * resid;
    hess = x_.transpose() * weight.asDiagonal() * x_;
    for (int c = 0; c < q; ++c) {
      const double mean = ComponentMean(theta, c);
      for (int j = 0; j < groups; ++j) {
        const int a = layout_.GroupCoef(j, c);
        grad[a] -= precision_[c] * (theta[a] - mean);
        for (int l = 0; l < groups; ++l) {
          const int b = layout_.GroupCoef(l, c);
          hess(a, b) += precision_[c] * ((j == l ? 1.0 : 0.0) - 1.0 / groups);
        }
      }
    }
  }

  // Newton iterations with step halving. Returns the final objective.
  double Maximize(Eigen::VectorXd& theta, int max_steps,
                  double separation_bound) const {
    double current = Objective(theta);
    const int p = layout_.size();
    for (int step = 0; step < max_steps; ++step) {
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      Derivatives(theta, grad, hess);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd delta = ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        const double jitter = 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
        hess += jitter * Eigen::MatrixXd::Identity(p, p);
        delta = hess.colPivHouseholderQr().solve(grad);
      }

      double t = 1.0;
      Eigen::VectorXd candidate = theta + delta;
      double next = Objective(candidate);
      while (!(next >= current - 1e-12 * std::abs(current)) && t > 1e-10) {
        t *= 0.5;
        candidate = theta + t * delta;
        next = Objective(candidate);
      }
      const double change = (t * delta).cwiseAbs().maxCoeff();
      theta = candidate;
      const double eta_max = (x_ * theta).cwiseAbs().maxCoeff();
      if (!(eta_max <= separation_bound)) {
        throw AuditError(ErrorCode::kSeparationDetected,
                         "linear predictor reached " + std::to_string(eta_max) +
                             " (bound " + std::to_string(separation_bound) +
                             "); the classes are (quasi-)separable");
      }
      const double improvement = next - current;
      current = next;
      if (change < 1e-10 || std::abs(improvement) <= 1e-15 * std::abs(current)) {
        break;
      }
    }
    return current;
  }

 private:
  const Layout& layout_;
  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  std::vector<int> group_;
  std::vector<double> precision_;
};

Eigen::MatrixXd BuildDesign(const Layout& layout, const Eigen::MatrixXd& xs,
                            const std::vector<int>& group_of_row) {
  const Eigen::Index n = xs.rows();
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, layout.size());
  const int q = layout.per_group();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = group_of_row[static_cast<std::size_t>(i)];
    for (int c = 0; c < q; ++c) {
      const int k = layout.ComponentFeature(c);
      design(i, layout.GroupCoef(j, c)) = k < 0 ? 1.0 : xs(i, k);
    }
    int c = 0;
    if (!layout.varying_intercept) design(i, layout.SharedCoef(c++)) = 1.0;
    for (int k : layout.fixed) design(i, layout.SharedCoef(c++)) = xs(i, k);
  }
  return design;
}

int FeatureIndex(std::span<const std::string> names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "model feature '" + name + "' is not a dataset feature");
  }
  return static_cast<int>(it - names.begin());
}

void CheckInstance(const MlmModel& model, std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "instance has " + std::to_string(x.size()) +
                         " values, model has " +
                         std::to_string(model.num_features()) + " features");
  }
}

}  // namespace

void MlmSpec::Validate(std::span<const std::string> feature_names) const {
  std::set<std::string> seen;
  for (const auto* list : {&varying_slope_features, &fixed_slope_features}) {
    for (const auto& name : *list) {
      FeatureIndex(feature_names, name);
      if (!seen.insert(name).second) {
        throw AuditError(ErrorCode::kInvalidArgument,
                         "feature '" + name +
                             "' is listed as both varying and fixed");
      }
    }
  }
  if (seen.size() != feature_names.size()) {
    for (const auto& name : feature_names) {
      if (!seen.count(name)) {
        throw AuditError(ErrorCode::kInvalidArgument,
                         "feature '" + name +
                             "' is neither a varying nor a fixed slope");
      }
    }
  }
}

int MlmModel::GroupIndex(std::string_view label) const {
  const auto it = std::find(groups.begin(), groups.end(), label);
  if (it == groups.end()) {
    throw AuditError(ErrorCode::kUnknownGroup,
                     "group '" + std::string(label) + "' is not in the model");
  }
  return static_cast<int>(it - groups.begin());
}

std::vector<double> MlmModel::Slopes(int group) const {
  std::vector<double> slopes(num_features(), 0.0);
  for (std::size_t i = 0; i < varying_features.size(); ++i) {
    slopes[static_cast<std::size_t>(varying_features[i])] =
        beta_varying[static_cast<std::size_t>(group)][i];
  }
  for (std::size_t i = 0; i < fixed_features.size(); ++i) {
    slopes[static_cast<std::size_t>(fixed_features[i])] = beta_fixed[i];
  }
  return slopes;
}

double MlmModel::LogOdds(std::span<const double> x, int group) const {
  CheckInstance(*this, x);
  if (group < 0 || static_cast<std::size_t>(group) >= groups.size()) {
    throw AuditError(ErrorCode::kUnknownGroup, "group index out of range");
  }
  const std::vector<double> slopes = Slopes(group);
  double eta = alpha[static_cast<std::size_t>(group)];
  for (std::size_t k = 0; k < slopes.size(); ++k) eta += slopes[k] * x[k];
  return eta;
}

MlmModel Fit(const Dataset& train, const MlmSpec& spec,
             const FitOptions& options) {
  spec.Validate(train.feature_names);
  if (!train.has_target()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "training data has no derived target");
  }
  if (options.max_iterations < 1 || options.max_newton_steps < 1 ||
      !(options.tolerance > 0) || !(options.variance_floor > 0) ||
      !(options.separation_bound > 0)) {
    throw AuditError(ErrorCode::kInvalidArgument, "invalid fit options");
  }
  if (options.fixed_variance && !(*options.fixed_variance > 0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "fixed_variance must be positive");
  }
  const auto num_groups = static_cast<int>(train.groups.size());
  for (int g = 0; g < num_groups; ++g) {
    int positives = 0;
    int total = 0;
    for (std::size_t i = 0; i < train.num_rows(); ++i) {
      if (train.group_of_row[i] != g) continue;
      ++total;
      positives += train.target[i];
    }
    if (total == 0 || positives == 0 || positives == total) {
      throw AuditError(ErrorCode::kDegenerateGroup,
                       "group '" + train.groups[static_cast<std::size_t>(g)] +
                           "' has " + std::to_string(positives) +
                           " positive of " + std::to_string(total) +
                           " training rows; both classes are required");
    }
  }

  Layout layout;
  layout.num_groups = num_groups;
  layout.varying_intercept = spec.varying_intercept;
  for (const auto& name : spec.varying_slope_features) {
    layout.varying.push_back(FeatureIndex(train.feature_names, name));
  }
  for (const auto& name : spec.fixed_slope_features) {
    layout.fixed.push_back(FeatureIndex(train.feature_names, name));
  }

  // Slopes are estimated on columns divided by their RMS. No centering, so
  // the penalty is the same quadratic form as in raw units.
  const Eigen::Index m = train.features.cols();
  std::vector<double> scale(static_cast<std::size_t>(m), 1.0);
  Eigen::MatrixXd xs = train.features;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double rms = std::sqrt(train.features.col(k).squaredNorm() /
                                 static_cast<double>(train.num_rows()));
    if (rms > 0) scale[static_cast<std::size_t>(k)] = rms;
    xs.col(k) /= scale[static_cast<std::size_t>(k)];
  }
  auto component_scale2 = [&](int c) {
    const int k = layout.ComponentFeature(c);
    return k < 0 ? 1.0 : scale[static_cast<std::size_t>(k)] *
                             scale[static_cast<std::size_t>(k)];
  };

  Eigen::VectorXd y(static_cast<Eigen::Index>(train.num_rows()));
  for (std::size_t i = 0; i < train.num_rows(); ++i) {
    y[static_cast<Eigen::Index>(i)] = train.target[i];
  }

  // Pooled start: one intercept and one slope per feature for every group.
  Layout pooled;
  pooled.num_groups = num_groups;
  pooled.varying_intercept = false;
  for (int k = 0; k < m; ++k) pooled.fixed.push_back(k);
  const Eigen::MatrixXd pooled_design =
      BuildDesign(pooled, xs, train.group_of_row);
  PenalizedLogit pooled_problem(pooled, pooled_design, y, train.group_of_row);
  pooled_problem.set_precision({});
  Eigen::VectorXd pooled_theta = Eigen::VectorXd::Zero(pooled.size());
  pooled_problem.Maximize(pooled_theta, options.max_newton_steps * 4,
                          options.separation_bound);

  const Eigen::MatrixXd design = BuildDesign(layout, xs, train.group_of_row);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.size());
  const int q = layout.per_group();
  auto pooled_value = [&](int feature) {
    return pooled_theta[feature < 0 ? 0 : 1 + feature];
  };
  for (int j = 0; j < num_groups; ++j) {
    for (int c = 0; c < q; ++c) {
      theta[layout.GroupCoef(j, c)] = pooled_value(layout.ComponentFeature(c));
    }
  }
  {
    int c = 0;
    if (!layout.varying_intercept) theta[layout.SharedCoef(c++)] = pooled_value(-1);
    for (int k : layout.fixed) theta[layout.SharedCoef(c++)] = pooled_value(k);
  }

  // Variance components in scaled units. The start value 1 leaves the groups
  // free enough that the first pass sees their spread.
  std::vector<double> sigma2(static_cast<std::size_t>(q), 1.0);
  if (options.fixed_variance) {
    for (int c = 0; c < q; ++c) {
      sigma2[static_cast<std::size_t>(c)] =
          *options.fixed_variance * component_scale2(c);
    }
  }

  PenalizedLogit problem(layout, design, y, train.group_of_row);
  FitMeta meta;
  auto set_variances = [&](const std::vector<double>& variances) {
    std::vector<double> precision(static_cast<std::size_t>(q));
    for (int c = 0; c < q; ++c) {
      precision[static_cast<std::size_t>(c)] =
          1.0 / variances[static_cast<std::size_t>(c)];
    }
    problem.set_precision(precision);
  };
  auto deviation_ss = [&](const Eigen::VectorXd& at, int c) {
    const double mean = problem.ComponentMean(at, c);
    double ss = 0.0;
    for (int j = 0; j < num_groups; ++j) {
      const double d = at[layout.GroupCoef(j, c)] - mean;
      ss += d * d;
    }
    return ss;
  };
  auto floor_of = [&](int c) { return options.variance_floor * component_scale2(c); };

  // Sum over the group coefficients of component c of the posterior
  // variance of their deviations from the group mean.
  auto posterior_spread = [&](const Eigen::MatrixXd& cov, int c) {
    double diag = 0.0;
    double total = 0.0;
    for (int j = 0; j < num_groups; ++j) {
      const int a = layout.GroupCoef(j, c);
      diag += cov(a, a);
      for (int l = 0; l < num_groups; ++l) total += cov(a, layout.GroupCoef(l, c));
    }
    return diag - total / num_groups;
  };

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    set_variances(sigma2);
    const double objective = problem.Maximize(theta, options.max_newton_steps,
                                              options.separation_bound);
    meta.iterations = iter;
    meta.penalized_log_likelihood = objective;
    if (iter > 1 && std::abs(objective - previous) <=
                        options.tolerance * std::max(1.0, std::abs(previous))) {
      meta.converged = true;
      break;
    }
    previous = objective;
    if (options.fixed_variance || num_groups < 2) continue;
    Eigen::MatrixXd cov;
    if (options.variance_update == VarianceUpdate::kLaplaceEm) {
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      problem.Derivatives(theta, grad, hess);
      cov = hess.ldlt().solve(Eigen::MatrixXd::Identity(layout.size(), layout.size()));
    }
    for (int c = 0; c < q; ++c) {
      double estimate = deviation_ss(theta, c) / num_groups;
      if (options.variance_update == VarianceUpdate::kLaplaceEm) {
        estimate = (deviation_ss(theta, c) + posterior_spread(cov, c)) /
                   (num_groups - 1);
      }
      if (!std::isfinite(estimate)) estimate = 0.0;
      sigma2[static_cast<std::size_t>(c)] = std::max(estimate, floor_of(c));
    }
  }

  MlmModel model;
  model.feature_names = train.feature_names;
  model.groups = train.groups;
  model.varying_intercept = layout.varying_intercept;
  model.varying_features = layout.varying;
  model.fixed_features = layout.fixed;
  model.fit_meta = meta;

  model.alpha.assign(static_cast<std::size_t>(num_groups), 0.0);
  model.beta_varying.assign(static_cast<std::size_t>(num_groups),
                            std::vector<double>(layout.varying.size(), 0.0));
  for (int j = 0; j < num_groups; ++j) {
    for (int c = 0; c < q; ++c) {
      const int k = layout.ComponentFeature(c);
      const double value = theta[layout.GroupCoef(j, c)];
      if (k < 0) {
        model.alpha[static_cast<std::size_t>(j)] = value;
      } else {
        const int v = layout.varying_intercept ? c - 1 : c;
        model.beta_varying[static_cast<std::size_t>(j)]
                          [static_cast<std::size_t>(v)] =
            value / scale[static_cast<std::size_t>(k)];
      }
    }
  }
  int c = 0;
  if (!layout.varying_intercept) {
    const double intercept = theta[layout.SharedCoef(c++)];
    std::fill(model.alpha.begin(), model.alpha.end(), intercept);
  }
  for (int k : layout.fixed) {
    model.beta_fixed.push_back(theta[layout.SharedCoef(c++)] /
                               scale[static_cast<std::size_t>(k)]);
  }

  auto mean_of = [&](auto value_of) {
    double sum = 0.0;
    for (int j = 0; j < num_groups; ++j) sum += value_of(j);
    return sum / num_groups;
  };
  model.mu_alpha = mean_of([&](int j) { return model.alpha[static_cast<std::size_t>(j)]; });
  model.sigma2_alpha =
      layout.varying_intercept ? sigma2[0] : 0.0;
  for (std::size_t v = 0; v < layout.varying.size(); ++v) {
    model.mu_beta.push_back(mean_of([&](int j) {
      return model.beta_varying[static_cast<std::size_t>(j)][v];
    }));
    const int comp = static_cast<int>(v) + (layout.varying_intercept ? 1 : 0);
    model.sigma2_beta.push_back(sigma2[static_cast<std::size_t>(comp)] /
                                component_scale2(comp));
  }
  return model;
}

double LogOdds(const MlmModel& model, std::span<const double> x,
               std::string_view group) {
  return model.LogOdds(x, model.GroupIndex(group));
}

double PredictProba(const MlmModel& model, std::span<const double> x,
                    std::string_view group) {
  return special::Sigmoid(LogOdds(model, x, group));
}

int PredictClass(const MlmModel& model, std::span<const double> x,
                 std::string_view group, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "decision threshold must lie in (0, 1)");
  }
  return PredictProba(model, x, group) >= threshold ? 1 : 0;
}

std::vector<double> PredictProba(const MlmModel& model, const Dataset& ds) {
  std::vector<double> probs(ds.num_rows());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    const std::string& label =
        ds.groups[static_cast<std::size_t>(ds.group_of_row[i])];
    probs[i] = PredictProba(model, ds.Row(i), label);
  }
  return probs;
}

std::vector<int> PredictClass(const MlmModel& model, const Dataset& ds,
                              double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "decision threshold must lie in (0, 1)");
  }
  const std::vector<double> probs = PredictProba(model, ds);
  std::vector<int> classes(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    classes[i] = probs[i] >= threshold ? 1 : 0;
  }
  return classes;
}

std::string_view VarianceUpdateName(VarianceUpdate update) {
  switch (update) {
    case VarianceUpdate::kModeDeviation: return "mode_deviation";
    case VarianceUpdate::kLaplaceEm: return "laplace_em";
  }
  return "mode_deviation";
}

VarianceUpdate ParseVarianceUpdate(std::string_view name) {
  if (name == "mode_deviation") return VarianceUpdate::kModeDeviation;
  if (name == "laplace_em") return VarianceUpdate::kLaplaceEm;
  throw AuditError(ErrorCode::kInvalidArgument,
                   "unknown variance update '" + std::string(name) + "'");
}

std::string_view ResidualKindName(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::kResponse: return "response";
    case ResidualKind::kPearson: return "pearson";
    case ResidualKind::kDeviance: return "deviance";
  }
  return "pearson";
}

ResidualKind ParseResidualKind(std::string_view name) {
  if (name == "response") return ResidualKind::kResponse;
  if (name == "pearson") return ResidualKind::kPearson;
  if (name == "deviance") return ResidualKind::kDeviance;
  throw AuditError(ErrorCode::kInvalidArgument,
                   "unknown residual kind '" + std::string(name) + "'");
}

Residuals ComputeResiduals(const MlmModel& model, const Dataset& train,
                           ResidualKind kind) {
  if (!train.has_target()) {
    throw AuditError(ErrorCode::kInvalidArgument, "dataset has no target");
  }
  constexpr double kClamp = 1e-12;
  Residuals out;
  out.kind = kind;
  const std::vector<double> probs = PredictProba(model, train);
  out.values.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (p < kClamp || p > 1.0 - kClamp) {
      p = std::clamp(p, kClamp, 1.0 - kClamp);
      ++out.clamped;
    }
    const double y = train.target[i];
    switch (kind) {
      case ResidualKind::kResponse:
        out.values.push_back(y - p);
        break;
      case ResidualKind::kPearson:
        out.values.push_back((y - p) / std::sqrt(p * (1.0 - p)));
        break;
      case ResidualKind::kDeviance: {
        const double dev =
            -2.0 * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        out.values.push_back(std::copysign(std::sqrt(dev), y - p));
        break;
      }
    }
  }
  return out;
}

Attribution IntrinsicAttribution(const MlmModel& model,
                                 std::span<const double> x,
                                 std::string_view group,
                                 std::span<const double> center) {
  CheckInstance(model, x);
  const int g = model.GroupIndex(group);
  if (!center.empty() && center.size() != x.size()) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "center must have one value per feature");
  }
  const std::vector<double> slopes = model.Slopes(g);
  Attribution out;
  out.method = AttributionMethod::kIntrinsic;
  out.group = std::string(group);
  out.instance.assign(x.begin(), x.end());
  out.base = model.alpha[static_cast<std::size_t>(g)];
  out.contributions.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (center.empty()) {
      out.contributions[k] = slopes[k] * x[k];
    } else {
      out.contributions[k] = slopes[k] * (x[k] - center[k]);
      out.base += slopes[k] * center[k];
    }
  }
  return out;
}

nlohmann::json ModelToJson(const MlmModel& model) {
  auto names_of = [&](const std::vector<int>& idx) {
    std::vector<std::string> names;
    for (int k : idx) names.push_back(model.feature_names[static_cast<std::size_t>(k)]);
    return names;
  };
  return {
      {"format", "mlmaudit.model"},
      {"version", kModelFormatVersion},
      {"feature_names", model.feature_names},
      {"groups", model.groups},
      {"varying_intercept", model.varying_intercept},
      {"varying_features", names_of(model.varying_features)},
      {"fixed_features", names_of(model.fixed_features)},
      {"alpha", model.alpha},
      {"beta_varying", model.beta_varying},
      {"beta_fixed", model.beta_fixed},
      {"mu_alpha", model.mu_alpha},
      {"sigma2_alpha", model.sigma2_alpha},
      {"mu_beta", model.mu_beta},
      {"sigma2_beta", model.sigma2_beta},
      {"fit_meta",
       {{"iterations", model.fit_meta.iterations},
        {"converged", model.fit_meta.converged},
        {"penalized_log_likelihood", model.fit_meta.penalized_log_likelihood}}},
  };
}

MlmModel ModelFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "mlmaudit.model") {
      throw AuditError(ErrorCode::kConfigError, "not an mlmaudit model");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw AuditError(ErrorCode::kConfigError,
                       "unsupported model format version " +
                           std::to_string(version));
    }
    MlmModel model;
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.groups = doc.at("groups").get<std::vector<std::string>>();
    model.varying_intercept = doc.at("varying_intercept").get<bool>();
    for (const auto& name : doc.at("varying_features")) {
      model.varying_features.push_back(
          FeatureIndex(model.feature_names, name.get<std::string>()));
    }
    for (const auto& name : doc.at("fixed_features")) {
      model.fixed_features.push_back(
          FeatureIndex(model.feature_names, name.get<std::string>()));
    }
    model.alpha = doc.at("alpha").get<std::vector<double>>();
    model.beta_varying =
        doc.at("beta_varying").get<std::vector<std::vector<double>>>();
    model.beta_fixed = doc.at("beta_fixed").get<std::vector<double>>();
    model.mu_alpha = doc.at("mu_alpha").get<double>();
    model.sigma2_alpha = doc.at("sigma2_alpha").get<double>();
    model.mu_beta = doc.at("mu_beta").get<std::vector<double>>();
    model.sigma2_beta = doc.at("sigma2_beta").get<std::vector<double>>();
    const auto& meta = doc.at("fit_meta");
    model.fit_meta.iterations = meta.at("iterations").get<int>();
    model.fit_meta.converged = meta.at("converged").get<bool>();
    model.fit_meta.penalized_log_likelihood =
        meta.at("penalized_log_likelihood").get<double>();

    const std::size_t groups = model.groups.size();
    const std::size_t varying = model.varying_features.size();
    bool ok = groups > 0 && model.alpha.size() == groups &&
              model.beta_varying.size() == groups &&
              model.beta_fixed.size() == model.fixed_features.size() &&
              model.mu_beta.size() == varying &&
              model.sigma2_beta.size() == varying &&
              varying + model.fixed_features.size() ==
                  model.feature_names.size() &&
              model.sigma2_alpha >= 0;
    for (const auto& row : model.beta_varying) ok = ok && row.size() == varying;
    for (double s : model.sigma2_beta) ok = ok && s >= 0;
    if (!ok) {
      throw AuditError(ErrorCode::kConfigError,
                       "model document has inconsistent array sizes");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kConfigError,
                     std::string("malformed model document: ") + e.what());
  } catch (const AuditError& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw AuditError(ErrorCode::kConfigError, e.what());
  }
}

}  // namespace mlmaudit
