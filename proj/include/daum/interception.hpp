#pragma once

#include "daum/uncertainty.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace daum {

/// Predictive mean `s` and uncertainty `u` of one metric for one instance.
struct MetricScore {
  double s = 0.0;
  double u = 0.0;
};

struct RewardConfig {
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};
  /// Fraction of instances promoted above all others by uncertainty.
  double uncertainty_pass_fraction = 0.0;

  void validate() const;
};

/// Maps the four per-metric scores of an instance to its expected reward.
using RewardFunction = std::function<double(std::span<const double>)>;

/// Reference reward: sum_k weights[k] * t_k.
RewardFunction weighted_sum_reward(const RewardConfig& config);

struct InterceptStrategy {
  enum class Kind { direct, indirect, reward_ranking };
  Kind kind = Kind::reward_ranking;
  std::size_t source_task = 0;
  std::size_t target_task = 0;

  std::string describe() const;
};

struct InterceptPlan {
  std::vector<int> z;          // 1 = pass downstream, 0 = intercept
  std::vector<double> reward;  // e_i used for ranking
  double rate = 0.0;           // realized interception rate
  InterceptStrategy strategy;
};

/// Two-tier ordering key: the top `fraction` of instances by u get 2 + u,
/// everyone else keeps s in [0, 1]. Non-decreasing in both s and u.
std::vector<double> combine_score_uncertainty(std::span<const MetricScore> scores, double fraction);

double expected_reward(std::span<const double> metric_scores, const RewardConfig& config);

/// Passes the ceil((1 - r) N) largest rewards (ties by index), which is
/// optimal for max sum e_i z_i under the cardinality constraint.
InterceptPlan solve_interception(std::span<const double> rewards, double rate);

/// Scores of `score_task` paired with the uncertainty of `uncertainty_task`.
std::vector<MetricScore> metric_scores(const UncertaintyBatch& reports, std::size_t score_task,
                                       std::size_t uncertainty_task);

/// End-to-end plan from batch reports: per-metric keys via
/// combine_score_uncertainty, rewards via `reward`, then solve_interception.
/// `uncertainty_source` optionally replaces each metric's uncertainty task
/// (cross-task substitution); empty means each metric uses its own.
InterceptPlan plan_interception(const UncertaintyBatch& reports, const RewardConfig& config,
                                const RewardFunction& reward, double rate,
                                std::span<const std::size_t> uncertainty_source = {});

/// Plan driven by one metric: keys from `score_task` means and
/// `uncertainty_task` variances. Same task is a direct strategy, different
/// tasks an indirect one.
InterceptPlan plan_single_metric(const UncertaintyBatch& reports, std::size_t score_task,
                                 std::size_t uncertainty_task, double uncertainty_pass_fraction,
                                 double rate);

}  // namespace daum
