#include "daum/latency.hpp"

#include "daum/core/errors.hpp"
#include "daum/uncertainty.hpp"

#include <algorithm>
#include <chrono>

namespace daum {

double median_ms(const std::function<void()>& fn, const TimingOptions& options) {
  if (options.repetitions == 0) throw ArgumentError("median_ms: repetitions must be positive");
  for (std::size_t i = 0; i < options.warmups; ++i) fn();
  std::vector<double> times;
  times.reserve(options.repetitions);
  for (std::size_t i = 0; i < options.repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

LatencyReport latency_bench(const PleArchitecture& teacher, const SwagPosterior& posterior,
                            const StudentNet& student, const Matrix& batch, std::size_t n_samples,
                            const TimingOptions& options, std::uint64_t seed) {
  LatencyReport report;
  report.batch_size = static_cast<std::size_t>(batch.rows());
  report.n_samples = n_samples;
  report.repetitions = options.repetitions;
  report.warmups = options.warmups;
  report.teacher_ms_per_batch = median_ms(
      [&] {
        const auto out = sampled_moments(teacher, posterior, batch, n_samples, seed);
        (void)out;
      },
      options);
  report.student_ms_per_batch = median_ms(
      [&] {
        const auto out = student_infer(student, batch);
        (void)out;
      },
      options);
  report.speedup = report.teacher_ms_per_batch / report.student_ms_per_batch;
  return report;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear_fit: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: x is constant");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

ScalingReport teacher_scaling(const PleArchitecture& teacher, const SwagPosterior& posterior, const Matrix& batch,
                              const std::vector<std::size_t>& sample_counts, const TimingOptions& options,
                              std::uint64_t seed) {
  ScalingReport report;
  std::vector<double> xs, ys;
  for (std::size_t m : sample_counts) {
    const double ms = median_ms(
        [&] {
          const auto out = sampled_moments(teacher, posterior, batch, m, seed);
          (void)out;
        },
        options);
    report.points.push_back({m, ms});
    xs.push_back(static_cast<double>(m));
    ys.push_back(ms);
  }
  report.fit = linear_fit(xs, ys);
  return report;
}

}  // namespace daum
