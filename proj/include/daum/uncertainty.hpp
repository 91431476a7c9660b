#pragma once

#include "daum/ple.hpp"
#include "daum/swag.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace daum {

inline constexpr std::size_t kDefaultInferenceSamples = 11;

/// Per-task predictive mean and population variance over M sampled passes.
struct UncertaintyReport {
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t n_samples = 0;
};

/// Reports for a batch; row i of `mean`/`variance` belongs to `ids[i]`.
struct UncertaintyBatch {
  std::vector<std::int64_t> ids;
  Matrix mean;
  Matrix variance;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(mean.rows()); }
  std::size_t n_tasks() const { return static_cast<std::size_t>(mean.cols()); }
  UncertaintyReport report(std::size_t i) const;
  std::vector<double> task_mean(std::size_t task) const;
  std::vector<double> task_variance(std::size_t task) const;
};

/// Sampled weights for pass m are drawn with derive_seed(seed, m), so the
/// result does not depend on evaluation order or thread count.
UncertaintyReport predict_with_uncertainty(const PleArchitecture& arch, const SwagPosterior& posterior,
                                           std::span<const double> x, std::size_t n_samples,
                                           std::uint64_t seed);

/// Batched form: every row sees the same M weight draws. `n_threads` > 1
/// spreads the draws across threads.
UncertaintyBatch predict_with_uncertainty(const PleArchitecture& arch, const SwagPosterior& posterior,
                                          const Matrix& features, std::size_t n_samples,
                                          std::uint64_t seed, std::size_t n_threads = 1);

/// predict_with_uncertainty without the M >= 2 requirement; M = 1 yields zero
/// variance. Used where only the cost of M passes matters.
UncertaintyBatch sampled_moments(const PleArchitecture& arch, const SwagPosterior& posterior,
                                 const Matrix& features, std::size_t n_samples, std::uint64_t seed,
                                 std::size_t n_threads = 1);

/// Conservative rule: +1 when variance >= tau, else +1 iff mean > 0.5, else -1.
int threshold_decide(const UncertaintyReport& report, double tau, std::size_t task);

/// Same rule with the variance of `source_task` and the mean of `target_task`.
int cross_task_decide(const UncertaintyReport& report, std::size_t source_task, std::size_t target_task,
                      double tau);

struct QuantileThreshold {
  /// +inf when nothing passes, 0 when everything passes.
  double tau = std::numeric_limits<double>::infinity();
  /// Passed instance indices in rank order (descending variance, ties by index).
  std::vector<std::size_t> selected;
};

/// Selects exactly ceil(pass_ratio * N) instances by variance.
QuantileThreshold uncertainty_quantile_threshold(std::span<const double> variances, double pass_ratio);
QuantileThreshold uncertainty_quantile_threshold(const std::vector<UncertaintyReport>& reports,
                                                 std::size_t task, double pass_ratio);

}  // namespace daum
