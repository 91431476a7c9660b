#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace daum {

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Throws MetricUndefined unless both classes occur.
double auc_roc(std::span<const double> scores, std::span<const double> labels);

/// Average precision: the mean over positives of the precision among all
/// instances scoring at least as high. Tied scores form one block, so a
/// constant scorer gets the positive prevalence. Throws MetricUndefined when
/// there is no positive.
double auc_pr(std::span<const double> scores, std::span<const double> labels);

/// Average ranks (1-based), ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws MetricUndefined when either
/// input is constant.
double spearman(std::span<const double> a, std::span<const double> b);

/// |A intersect B| / |A union B| of two index sets; 1 when both are empty.
double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct HistogramComparison {
  /// n_bins + 1 equal-width edges over the pooled range.
  std::vector<double> edges;
  std::vector<std::size_t> teacher_counts;
  std::vector<std::size_t> student_counts;
  double spearman = 0.0;
  bool spearman_defined = false;
};

HistogramComparison uncertainty_histogram_compare(std::span<const double> teacher, std::span<const double> student,
                                                  std::size_t n_bins);

}  // namespace daum
