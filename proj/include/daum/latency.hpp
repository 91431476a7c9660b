#pragma once

#include "daum/distill.hpp"
#include "daum/ple.hpp"
#include "daum/swag.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace daum {

/// Pure inference timing (no data loading). Run with no concurrent load.
struct LatencyReport {
  double teacher_ms_per_batch = 0.0;
  double student_ms_per_batch = 0.0;
  std::size_t batch_size = 0;
  std::size_t n_samples = 0;
  double speedup = 0.0;
  std::size_t repetitions = 0;
  std::size_t warmups = 0;
};

struct TimingOptions {
  std::size_t repetitions = 30;
  std::size_t warmups = 5;
};

/// Median wall-clock milliseconds of `fn` after the warm-up calls.
double median_ms(const std::function<void()>& fn, const TimingOptions& options);

/// M-sample teacher inference versus one student pass over the same batch.
LatencyReport latency_bench(const PleArchitecture& teacher, const SwagPosterior& posterior,
                            const StudentNet& student, const Matrix& batch, std::size_t n_samples,
                            const TimingOptions& options, std::uint64_t seed = 0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct ScalingPoint {
  std::size_t n_samples = 0;
  double teacher_ms = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  LinearFit fit;
};

/// Teacher time for each M and the linear fit of time against M.
ScalingReport teacher_scaling(const PleArchitecture& teacher, const SwagPosterior& posterior, const Matrix& batch,
                              const std::vector<std::size_t>& sample_counts, const TimingOptions& options,
                              std::uint64_t seed = 0);

}  // namespace daum
