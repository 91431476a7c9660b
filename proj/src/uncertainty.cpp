#include "daum/uncertainty.hpp"

#include "daum/core/errors.hpp"
#include "daum/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace daum {

std::size_t ratio_count(double ratio, std::size_t n) {
  const double raw = std::ceil(ratio * static_cast<double>(n) - 1e-9);
  if (raw <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(raw));
}

std::vector<std::size_t> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
  auto idx = rank_descending(scores);
  idx.resize(std::min(k, idx.size()));
  return idx;
}

std::vector<bool> top_k_mask(std::span<const double> scores, std::size_t k) {
  std::vector<bool> mask(scores.size(), false);
  for (std::size_t i : top_k(scores, k)) mask[i] = true;
  return mask;
}

UncertaintyReport UncertaintyBatch::report(std::size_t i) const {
  UncertaintyReport r;
  const auto row = static_cast<Eigen::Index>(i);
  for (Eigen::Index t = 0; t < mean.cols(); ++t) {
    r.mean.push_back(mean(row, t));
    r.variance.push_back(variance(row, t));
  }
  r.n_samples = n_samples;
  return r;
}

std::vector<double> UncertaintyBatch::task_mean(std::size_t task) const {
  const auto col = mean.col(static_cast<Eigen::Index>(task));
  return {col.begin(), col.end()};
}

std::vector<double> UncertaintyBatch::task_variance(std::size_t task) const {
  const auto col = variance.col(static_cast<Eigen::Index>(task));
  return {col.begin(), col.end()};
}

UncertaintyBatch predict_with_uncertainty(const PleArchitecture& arch, const SwagPosterior& posterior,
                                          const Matrix& features, std::size_t n_samples,
                                          std::uint64_t seed, std::size_t n_threads) {
  if (n_samples < 2) throw ArgumentError("predict_with_uncertainty: need at least 2 samples");
  return sampled_moments(arch, posterior, features, n_samples, seed, n_threads);
}

UncertaintyBatch sampled_moments(const PleArchitecture& arch, const SwagPosterior& posterior,
                                 const Matrix& features, std::size_t n_samples, std::uint64_t seed,
                                 std::size_t n_threads) {
  if (n_samples == 0) throw ArgumentError("sampled_moments: need at least 1 sample");
  if (posterior.dim() != arch.param_count())
    throw ShapeError("predict_with_uncertainty: posterior does not match architecture");

  const Eigen::Index n = features.rows();
  const Eigen::Index T = static_cast<Eigen::Index>(arch.config().n_tasks);
  std::vector<Matrix> draws(n_samples);

  auto run_sample = [&](std::size_t m) {
    std::vector<double> w(posterior.dim());
    sample_weights_into(posterior, derive_seed(seed, m), w);
    draws[m] = ple_predict(arch, w, features);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(n_threads, n_samples));
  if (workers == 1) {
    for (std::size_t m = 0; m < n_samples; ++m) run_sample(m);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t m = w; m < n_samples; m += workers) run_sample(m);
      });
  }

  UncertaintyBatch out;
  out.n_samples = n_samples;
  out.seed = seed;
  out.mean = Matrix::Zero(n, T);
  out.variance = Matrix::Zero(n, T);
  // Moments of offsets from the first draw; identical draws give exactly zero variance.
  const Matrix& ref = draws.front();
  for (const auto& d : draws) out.mean += d - ref;
  out.mean /= static_cast<double>(n_samples);
  for (const auto& d : draws) out.variance += (d - ref - out.mean).cwiseAbs2();
  out.variance /= static_cast<double>(n_samples);
  out.mean += ref;
  out.ids.resize(static_cast<std::size_t>(n));
  std::iota(out.ids.begin(), out.ids.end(), 0);
  return out;
}

UncertaintyReport predict_with_uncertainty(const PleArchitecture& arch, const SwagPosterior& posterior,
                                           std::span<const double> x, std::size_t n_samples,
                                           std::uint64_t seed) {
  if (x.size() != arch.config().input_dim) throw ShapeError("predict_with_uncertainty: input size mismatch");
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  return predict_with_uncertainty(arch, posterior, row, n_samples, seed).report(0);
}

namespace {

void check_task(const UncertaintyReport& report, std::size_t task) {
  if (task >= report.mean.size() || task >= report.variance.size())
    throw ArgumentError("unknown task index " + std::to_string(task));
}

}  // namespace

int threshold_decide(const UncertaintyReport& report, double tau, std::size_t task) {
  return cross_task_decide(report, task, task, tau);
}

int cross_task_decide(const UncertaintyReport& report, std::size_t source_task, std::size_t target_task,
                      double tau) {
  if (!(tau >= 0.0)) throw ArgumentError("decision threshold must be nonnegative");
  check_task(report, source_task);
  check_task(report, target_task);
  if (report.variance[source_task] >= tau) return +1;
  return report.mean[target_task] > 0.5 ? +1 : -1;
}

QuantileThreshold uncertainty_quantile_threshold(std::span<const double> variances, double pass_ratio) {
  if (variances.empty()) throw ArgumentError("uncertainty_quantile_threshold: empty batch");
  if (!(pass_ratio >= 0.0 && pass_ratio <= 1.0))
    throw ArgumentError("uncertainty_quantile_threshold: pass_ratio must lie in [0, 1]");
  QuantileThreshold out;
  const std::size_t k = ratio_count(pass_ratio, variances.size());
  out.selected = top_k(variances, k);
  if (k == variances.size())
    out.tau = 0.0;
  else if (k > 0)
    out.tau = variances[out.selected.back()];
  return out;
}

QuantileThreshold uncertainty_quantile_threshold(const std::vector<UncertaintyReport>& reports,
                                                 std::size_t task, double pass_ratio) {
  std::vector<double> v;
  v.reserve(reports.size());
  for (const auto& r : reports) {
    check_task(r, task);
    v.push_back(r.variance[task]);
  }
  return uncertainty_quantile_threshold(v, pass_ratio);
}

}  // namespace daum
