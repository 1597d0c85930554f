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

#include "mlmaudit/explain_eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mlmaudit/error.h"
#include "mlmaudit/rng.h"
#include "mlmaudit/special_functions.h"

namespace mlmaudit {
namespace {

constexpr double kSignTolerance = 1e-12;
constexpr double kMaxExcludedShare = 0.2;

int SignOf(double v) {
  if (std::abs(v) < kSignTolerance) return 0;
  return v > 0 ? 1 : -1;
}

std::vector<double> MidRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> Magnitudes(std::span<const double> values) {
  std::vector<double> out;
  for (double v : values) out.push_back(std::abs(v));
  return out;
}

MeanStd Summarize(const std::vector<double>& repeat_means) {
  MeanStd out;
  if (repeat_means.empty()) {
    out.mean = Outcome::Flagged("NoValidRepeats");
    return out;
  }
  double mean = 0.0;
  for (double v : repeat_means) mean += v;
  mean /= static_cast<double>(repeat_means.size());
  double var = 0.0;
  for (double v : repeat_means) var += (v - mean) * (v - mean);
  out.mean = Outcome::Of(mean);
  out.std = std::sqrt(var / static_cast<double>(repeat_means.size()));
  return out;
}

nlohmann::json OutcomeJson(const Outcome& o) {
  if (o.ok()) return *o.value;
  return nullptr;
}

nlohmann::json MeanStdJson(const MeanStd& m) {
  nlohmann::json out = {{"mean", OutcomeJson(m.mean)}, {"std", m.std}};
  if (!m.mean.flag.empty()) out["flag"] = m.mean.flag;
  return out;
}

}  // namespace

Outcome SpearmanRho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "rank correlation needs two vectors of equal length >= 2");
  }
  const std::vector<double> ra = MidRanks(Magnitudes(a));
  const std::vector<double> rb = MidRanks(Magnitudes(b));
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return Outcome::Flagged("ConstantVector");
  return Outcome::Of(std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0));
}

double Pux(const Attribution& intrinsic, const Attribution& explained) {
  return std::abs(special::Sigmoid(intrinsic.Reconstructed()) -
                  special::Sigmoid(explained.Reconstructed()));
}

double Poifs(const Attribution& intrinsic, const Attribution& explained) {
  const std::size_t m = intrinsic.contributions.size();
  if (m == 0 || explained.contributions.size() != m) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "attributions differ in feature count");
  }
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const int si = SignOf(intrinsic.contributions[k]);
    const int se = SignOf(explained.contributions[k]);
    if (si != 0 && se != 0 && si != se) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(m);
}

std::vector<double> MagnitudeRanks(std::span<const double> contributions) {
  return MidRanks(Magnitudes(contributions));
}

Attribution Explain(const MlmModel& model, const Dataset& train,
                    std::span<const double> x, int group,
                    AttributionMethod method, const ExplainerSettings& settings,
                    std::uint64_t seed, std::int64_t instance_id) {
  if (group < 0 || static_cast<std::size_t>(group) >= model.groups.size()) {
    throw AuditError(ErrorCode::kUnknownGroup, "group index out of range");
  }
  const std::string& label = model.groups[static_cast<std::size_t>(group)];
  Attribution out;
  switch (method) {
    case AttributionMethod::kIntrinsic:
      out = IntrinsicAttribution(model, x, label);
      break;
    case AttributionMethod::kKernelShap: {
      const int train_group = train.GroupIndex(label);
      if (train_group < 0) {
        throw AuditError(ErrorCode::kDegenerateBackground,
                         "group '" + label + "' has no training rows");
      }
      const BackgroundSet bg = SampleBackground(
          train, train_group, settings.background_size,
          DeriveSeed(seed, {StreamTag("background"),
                            static_cast<std::uint64_t>(group)}));
      out = KernelShap(ModelLogOdds(model, group), x, bg);
      break;
    }
    case AttributionMethod::kLinearLime: {
      LimeConfig cfg = settings.lime;
      cfg.perturbation_scale = FeatureStd(train);
      cfg.seed = DeriveSeed(seed, {StreamTag("lime"),
                                   static_cast<std::uint64_t>(instance_id)});
      out = LinearLime(ModelLogOdds(model, group), x, cfg);
      break;
    }
  }
  out.group = label;
  out.instance_id = instance_id;
  out.instance.assign(x.begin(), x.end());
  return out;
}

ExplainEvalResult EvaluateExplainer(const MlmModel& model, const Dataset& train,
                                    AttributionMethod method,
                                    const ProtocolSpec& protocol,
                                    const ExplainerSettings& settings) {
  if (protocol.n_instances == 0 || protocol.n_repeats == 0) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "protocol needs n_instances and n_repeats >= 1");
  }
  ExplainEvalResult result;
  result.method = method;
  result.protocol = protocol;
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    GroupExplainEval eval;
    eval.group = model.groups[g];
    const int train_group = train.GroupIndex(eval.group);
    const std::vector<std::size_t> rows =
        train_group >= 0 ? train.RowsInGroup(train_group)
                         : std::vector<std::size_t>{};
    if (rows.empty()) {
      eval.rho_order.mean = eval.pux.mean = eval.poifs.mean =
          Outcome::Flagged("NoRows");
      result.groups.push_back(std::move(eval));
      continue;
    }
    eval.sampled_with_replacement = rows.size() < protocol.n_instances;

    struct Scores {
      bool failed = false;
      Outcome rho;
      double pux = 0.0;
      double poifs = 0.0;
    };
    std::map<std::size_t, Scores> cache;
    auto score_row = [&](std::size_t row) -> const Scores& {
      auto it = cache.find(row);
      if (it != cache.end()) return it->second;
      Scores s;
      try {
        const std::vector<double> x = train.Row(row);
        const auto id = static_cast<std::int64_t>(train.row_ids[row]);
        const Attribution intrinsic = IntrinsicAttribution(model, x, eval.group);
        const Attribution explained =
            Explain(model, train, x, static_cast<int>(g), method, settings,
                    protocol.seed, id);
        s.rho = SpearmanRho(intrinsic.contributions, explained.contributions);
        s.pux = Pux(intrinsic, explained);
        s.poifs = Poifs(intrinsic, explained);
      } catch (const AuditError&) {
        s.failed = true;
      }
      return cache.emplace(row, std::move(s)).first->second;
    };

    std::vector<double> rho_means, pux_means, poifs_means;
    for (std::size_t r = 0; r < protocol.n_repeats; ++r) {
      Rng rng = MakeRng(DeriveSeed(
          protocol.seed, {StreamTag("protocol"), static_cast<std::uint64_t>(g),
                          static_cast<std::uint64_t>(r)}));
      std::vector<std::size_t> sample;
      if (eval.sampled_with_replacement) {
        std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
        for (std::size_t i = 0; i < protocol.n_instances; ++i) {
          sample.push_back(rows[pick(rng)]);
        }
      } else {
        std::sample(rows.begin(), rows.end(), std::back_inserter(sample),
                    protocol.n_instances, rng);
      }
      double rho_sum = 0.0, pux_sum = 0.0, poifs_sum = 0.0;
      std::size_t rho_n = 0, n = 0, excluded = 0;
      for (std::size_t row : sample) {
        const Scores& s = score_row(row);
        if (s.failed) {
          ++excluded;
          continue;
        }
        ++n;
        pux_sum += s.pux;
        poifs_sum += s.poifs;
        if (s.rho.ok()) {
          rho_sum += *s.rho.value;
          ++rho_n;
        } else {
          ++excluded;
        }
      }
      eval.excluded += excluded;
      if (static_cast<double>(excluded) >
              kMaxExcludedShare * static_cast<double>(protocol.n_instances) ||
          rho_n == 0) {
        ++eval.invalid_repeats;
        continue;
      }
      rho_means.push_back(rho_sum / static_cast<double>(rho_n));
      pux_means.push_back(pux_sum / static_cast<double>(n));
      poifs_means.push_back(poifs_sum / static_cast<double>(n));
    }
    eval.rho_order = Summarize(rho_means);
    eval.pux = Summarize(pux_means);
    eval.poifs = Summarize(poifs_means);
    result.groups.push_back(std::move(eval));
  }
  return result;
}

InstanceComparison CompareInstance(const MlmModel& model, const Dataset& train,
                                   std::span<const double> x,
                                   std::string_view group,
                                   const ExplainerSettings& settings,
                                   std::uint64_t seed,
                                   std::int64_t instance_id) {
  const int g = model.GroupIndex(group);
  InstanceComparison out;
  out.group = std::string(group);
  out.feature_names = model.feature_names;
  out.instance.assign(x.begin(), x.end());
  out.intrinsic = Explain(model, train, x, g, AttributionMethod::kIntrinsic,
                          settings, seed, instance_id);
  out.shap = Explain(model, train, x, g, AttributionMethod::kKernelShap,
                     settings, seed, instance_id);
  out.lime = Explain(model, train, x, g, AttributionMethod::kLinearLime,
                     settings, seed, instance_id);

  const std::vector<double>& ref = out.intrinsic.contributions;
  double scale = 0.0;
  for (double v : ref) scale = std::max(scale, std::abs(v));
  const double tie = 1e-9 * scale;
  for (const Attribution* other : {&out.shap, &out.lime}) {
    const std::string prefix(MethodName(other->method));
    const std::vector<double>& c = other->contributions;
    bool order_flipped = false;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      for (std::size_t k = 0; k < ref.size(); ++k) {
        if (std::abs(ref[j]) > std::abs(ref[k]) + tie &&
            std::abs(c[j]) < std::abs(c[k])) {
          order_flipped = true;
        }
      }
    }
    if (order_flipped) out.flags.push_back(prefix + ":order");
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const int si = SignOf(ref[k]);
      const int se = SignOf(c[k]);
      if (si != 0 && se != 0 && si != se) {
        out.flags.push_back(prefix + ":sign:" + out.feature_names[k]);
      }
    }
  }
  return out;
}

nlohmann::json ToJson(const InstanceComparison& comparison) {
  nlohmann::json methods = nlohmann::json::object();
  for (const Attribution* a :
       {&comparison.intrinsic, &comparison.shap, &comparison.lime}) {
    nlohmann::json entry = ToJson(*a, comparison.feature_names);
    entry["magnitude_ranks"] = MagnitudeRanks(a->contributions);
    std::vector<int> signs;
    for (double v : a->contributions) signs.push_back(SignOf(v));
    entry["signs"] = signs;
    methods[std::string(MethodName(a->method))] = entry;
  }
  nlohmann::json instance = nlohmann::json::object();
  for (std::size_t k = 0; k < comparison.instance.size(); ++k) {
    instance[comparison.feature_names[k]] = comparison.instance[k];
  }
  return {{"group", comparison.group},
          {"instance", instance},
          {"methods", methods},
          {"flags", comparison.flags}};
}

nlohmann::json ToJson(const ExplainEvalResult& result) {
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupExplainEval& g : result.groups) {
    groups.push_back({{"group", g.group},
                      {"rho_order", MeanStdJson(g.rho_order)},
                      {"pux", MeanStdJson(g.pux)},
                      {"poifs", MeanStdJson(g.poifs)},
                      {"excluded", g.excluded},
                      {"invalid_repeats", g.invalid_repeats},
                      {"sampled_with_replacement", g.sampled_with_replacement}});
  }
  return {{"method", MethodName(result.method)},
          {"protocol",
           {{"n_instances", result.protocol.n_instances},
            {"n_repeats", result.protocol.n_repeats},
            {"seed", result.protocol.seed}}},
          {"groups", groups}};
}

}  // namespace mlmaudit
