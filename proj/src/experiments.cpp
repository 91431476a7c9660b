#include "daum/experiments.hpp"

#include "daum/core/errors.hpp"
#include "daum/metrics.hpp"
#include "daum/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace daum {

namespace {

void check_inputs(const Matrix& labels, const UncertaintyBatch& reports, std::size_t task) {
  if (static_cast<std::size_t>(labels.rows()) != reports.size())
    throw DataError("reports cover " + std::to_string(reports.size()) + " instances, labels " +
                    std::to_string(labels.rows()));
  if (task >= reports.n_tasks() || task >= static_cast<std::size_t>(labels.cols()))
    throw ArgumentError("task index out of range");
}

void check_ratios(const std::vector<double>& ratios) {
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] >= 0.0 && ratios[i] <= 1.0)) throw ArgumentError("pass ratios must lie in [0, 1]");
    if (i > 0 && ratios[i] < ratios[i - 1]) throw ArgumentError("pass ratios must be sorted ascending");
  }
}

struct Counts {
  std::size_t passed = 0;
  std::size_t residual = 0;
};

Counts count_positives(const Matrix& labels, const UncertaintyBatch& reports, const std::vector<bool>& passed,
                       std::size_t count_task) {
  Counts c;
  const auto t = static_cast<Eigen::Index>(count_task);
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    if (labels(i, t) != 1.0) continue;
    if (passed[static_cast<std::size_t>(i)]) {
      ++c.passed;
    } else if (reports.mean(i, t) > 0.5) {
      ++c.residual;
    }
  }
  return c;
}

std::vector<bool> pass_mask(const std::vector<std::size_t>& selected, std::size_t n) {
  std::vector<bool> mask(n, false);
  for (auto i : selected) mask[i] = true;
  return mask;
}

}  // namespace

PassingCurve residual_passing_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                         std::size_t pass_task, std::size_t eval_task,
                                         const std::vector<double>& ratios) {
  check_inputs(labels, reports, pass_task);
  check_inputs(labels, reports, eval_task);
  check_ratios(ratios);
  const std::vector<double> variance = reports.task_variance(pass_task);
  const std::vector<double> mean = reports.task_mean(eval_task);
  PassingCurve curve{pass_task, eval_task, {}};
  for (double ratio : ratios) {
    const auto selected = uncertainty_quantile_threshold(variance, ratio).selected;
    const auto mask = pass_mask(selected, reports.size());
    std::vector<double> s, y;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (!mask[i]) {
        s.push_back(mean[i]);
        y.push_back(labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(eval_task)));
      }
    PassingRow row;
    row.ratio = ratio;
    row.n_passed = selected.size();
    try {
      row.residual_auc_roc = auc_roc(s, y);
      row.residual_auc_pr = auc_pr(s, y);
      row.residual_defined = true;
    } catch (const MetricUndefined&) {
      row.residual_auc_roc = row.residual_auc_pr = std::nan("");
    }
    const auto counts = count_positives(labels, reports, mask, eval_task);
    row.directly_passed_positives = counts.passed;
    row.residual_classified_positives = counts.residual;
    row.total_downstream_positives = counts.passed + counts.residual;
    curve.rows.push_back(row);
  }
  return curve;
}

PassingCurve downstream_positive_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                            std::size_t pass_task, const std::vector<double>& ratios,
                                            std::size_t count_task) {
  check_inputs(labels, reports, pass_task);
  check_inputs(labels, reports, count_task);
  check_ratios(ratios);
  const std::vector<double> variance = reports.task_variance(pass_task);
  PassingCurve curve{pass_task, count_task, {}};
  for (double ratio : ratios) {
    const auto selected = uncertainty_quantile_threshold(variance, ratio).selected;
    const auto counts = count_positives(labels, reports, pass_mask(selected, reports.size()), count_task);
    PassingRow row;
    row.ratio = ratio;
    row.n_passed = selected.size();
    row.residual_auc_roc = row.residual_auc_pr = std::nan("");
    row.directly_passed_positives = counts.passed;
    row.residual_classified_positives = counts.residual;
    row.total_downstream_positives = counts.passed + counts.residual;
    curve.rows.push_back(row);
  }
  return curve;
}

std::vector<FixedBudgetRow> fixed_passed_positives_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                                              const std::vector<std::size_t>& strategies,
                                                              const std::vector<std::size_t>& budgets,
                                                              std::size_t count_task) {
  check_inputs(labels, reports, count_task);
  const std::size_t n = reports.size();
  const auto t = static_cast<Eigen::Index>(count_task);
  std::vector<FixedBudgetRow> out;
  for (std::size_t source : strategies) {
    check_inputs(labels, reports, source);
    const auto order = rank_descending(reports.task_variance(source));
    // passed_at[k]: positives among the first k of the ranking.
    std::vector<std::size_t> passed_at(n + 1, 0);
    // residual_at[k]: positives after position k classified by mean > 0.5.
    std::vector<std::size_t> residual_at(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k)
      passed_at[k + 1] = passed_at[k] + (labels(static_cast<Eigen::Index>(order[k]), t) == 1.0 ? 1 : 0);
    for (std::size_t k = n; k-- > 0;) {
      const auto i = static_cast<Eigen::Index>(order[k]);
      residual_at[k] = residual_at[k + 1] + (labels(i, t) == 1.0 && reports.mean(i, t) > 0.5 ? 1 : 0);
    }
    for (std::size_t budget : budgets) {
      FixedBudgetRow row;
      row.pass_task = source;
      row.budget = budget;
      const auto it = std::lower_bound(passed_at.begin(), passed_at.end(), budget);
      if (it != passed_at.end() && *it == budget) {
        const auto k = static_cast<std::size_t>(it - passed_at.begin());
        row.reachable = true;
        row.n_passed = k;
        row.ratio = n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
        row.total_downstream_positives = budget + residual_at[k];
      }
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace daum
