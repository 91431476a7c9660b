#include "daum/interception.hpp"

#include "daum/core/errors.hpp"
#include "daum/ranking.hpp"

#include <algorithm>

namespace daum {

void RewardConfig::validate() const {
  bool any_positive = false;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("reward weights must be nonnegative");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw ConfigError("at least one reward weight must be positive");
  if (!(uncertainty_pass_fraction >= 0.0 && uncertainty_pass_fraction <= 1.0))
    throw ConfigError("uncertainty_pass_fraction must lie in [0, 1]");
}

RewardFunction weighted_sum_reward(const RewardConfig& config) {
  config.validate();
  return [weights = config.weights](std::span<const double> t) {
    if (t.size() != weights.size()) throw ShapeError("reward: expected four metric scores");
    double e = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) e += weights[k] * t[k];
    return e;
  };
}

std::string InterceptStrategy::describe() const {
  switch (kind) {
    case Kind::direct:
      return "direct:" + task_name(source_task);
    case Kind::indirect:
      return "indirect:" + task_name(source_task) + "->" + task_name(target_task);
    case Kind::reward_ranking:
      return "reward_ranking";
  }
  return "reward_ranking";
}

std::vector<double> combine_score_uncertainty(std::span<const MetricScore> scores, double fraction) {
  if (scores.empty()) throw ArgumentError("combine_score_uncertainty: empty batch");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw ArgumentError("combine_score_uncertainty: fraction must lie in [0, 1]");
  std::vector<double> u;
  std::vector<double> key;
  u.reserve(scores.size());
  key.reserve(scores.size());
  for (const auto& m : scores) {
    if (!(m.s >= 0.0 && m.s <= 1.0) || !(m.u >= 0.0))
      throw ArgumentError("combine_score_uncertainty: need s in [0,1] and u >= 0");
    u.push_back(m.u);
    key.push_back(m.s);
  }
  for (std::size_t i : top_k(u, ratio_count(fraction, scores.size()))) key[i] = 2.0 + scores[i].u;
  return key;
}

double expected_reward(std::span<const double> metric_scores, const RewardConfig& config) {
  return weighted_sum_reward(config)(metric_scores);
}

InterceptPlan solve_interception(std::span<const double> rewards, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("solve_interception: rate must lie in [0, 1]");
  InterceptPlan plan;
  const std::size_t n = rewards.size();
  plan.reward.assign(rewards.begin(), rewards.end());
  plan.z.assign(n, 0);
  for (std::size_t i : top_k(rewards, ratio_count(1.0 - rate, n))) plan.z[i] = 1;
  std::size_t intercepted = 0;
  for (int z : plan.z) intercepted += z == 0 ? 1 : 0;
  plan.rate = n == 0 ? 0.0 : static_cast<double>(intercepted) / static_cast<double>(n);
  return plan;
}

std::vector<MetricScore> metric_scores(const UncertaintyBatch& reports, std::size_t score_task,
                                       std::size_t uncertainty_task) {
  if (score_task >= reports.n_tasks() || uncertainty_task >= reports.n_tasks())
    throw ArgumentError("metric_scores: task index out of range");
  std::vector<MetricScore> out(reports.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = {reports.mean(r, static_cast<Eigen::Index>(score_task)),
              reports.variance(r, static_cast<Eigen::Index>(uncertainty_task))};
  }
  return out;
}

InterceptPlan plan_interception(const UncertaintyBatch& reports, const RewardConfig& config,
                                const RewardFunction& reward, double rate,
                                std::span<const std::size_t> uncertainty_source) {
  config.validate();
  const std::size_t T = reports.n_tasks();
  if (T != config.weights.size()) throw ShapeError("plan_interception: reward needs four metrics");
  if (!uncertainty_source.empty() && uncertainty_source.size() != T)
    throw ShapeError("plan_interception: one uncertainty source per metric");

  std::vector<std::vector<double>> keys(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t src = uncertainty_source.empty() ? t : uncertainty_source[t];
    const auto scores = metric_scores(reports, t, src);
    keys[t] = combine_score_uncertainty(scores, config.uncertainty_pass_fraction);
  }
  std::vector<double> e(reports.size());
  std::vector<double> t_scores(T);
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) t_scores[t] = keys[t][i];
    e[i] = reward(t_scores);
  }
  InterceptPlan plan = solve_interception(e, rate);
  if (!uncertainty_source.empty()) {
    for (std::size_t t = 0; t < T; ++t)
      if (uncertainty_source[t] != t) {
        plan.strategy = {InterceptStrategy::Kind::indirect, uncertainty_source[t], t};
        break;
      }
  }
  return plan;
}

InterceptPlan plan_single_metric(const UncertaintyBatch& reports, std::size_t score_task,
                                 std::size_t uncertainty_task, double uncertainty_pass_fraction,
                                 double rate) {
  const auto scores = metric_scores(reports, score_task, uncertainty_task);
  InterceptPlan plan = solve_interception(combine_score_uncertainty(scores, uncertainty_pass_fraction), rate);
  plan.strategy = {score_task == uncertainty_task ? InterceptStrategy::Kind::direct
                                                  : InterceptStrategy::Kind::indirect,
                   uncertainty_task, score_task};
  return plan;
}

}  // namespace daum
