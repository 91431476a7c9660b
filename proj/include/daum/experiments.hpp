#pragma once

#include "daum/core/dense.hpp"
#include "daum/ple.hpp"
#include "daum/uncertainty.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace daum {

/// One pass ratio. AUC fields are NaN (and the flag false) when the residual
/// traffic holds a single class.
struct PassingRow {
  double ratio = 0.0;
  std::size_t n_passed = 0;
  double residual_auc_roc = 0.0;
  double residual_auc_pr = 0.0;
  bool residual_defined = false;
  std::size_t directly_passed_positives = 0;
  std::size_t residual_classified_positives = 0;
  std::size_t total_downstream_positives = 0;
};

struct PassingCurve {
  std::size_t pass_task = 0;
  std::size_t eval_task = 0;
  std::vector<PassingRow> rows;
};

/// For each ratio, passes the ceil(ratio N) instances with the largest
/// pass_task variance and scores the eval_task mean on the remainder. The
/// count columns are filled for eval_task as in downstream_positive_experiment.
PassingCurve residual_passing_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                         std::size_t pass_task, std::size_t eval_task,
                                         const std::vector<double>& ratios);

/// Positives of count_task passed directly plus remaining positives whose
/// count_task mean exceeds 0.5.
PassingCurve downstream_positive_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                            std::size_t pass_task, const std::vector<double>& ratios,
                                            std::size_t count_task = kDeal);

struct FixedBudgetRow {
  std::size_t pass_task = 0;
  std::size_t budget = 0;
  bool reachable = false;
  double ratio = 0.0;
  std::size_t n_passed = 0;
  std::size_t total_downstream_positives = 0;
};

/// For each strategy (a pass-task index) and budget, finds the smallest pass
/// count whose directly passed count_task positives equal the budget and
/// reports the resulting downstream total.
std::vector<FixedBudgetRow> fixed_passed_positives_experiment(const Matrix& labels, const UncertaintyBatch& reports,
                                                              const std::vector<std::size_t>& strategies,
                                                              const std::vector<std::size_t>& budgets,
                                                              std::size_t count_task = kDeal);

}  // namespace daum
