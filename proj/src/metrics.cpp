#include "daum/metrics.hpp"

#include "daum/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace daum {

namespace {

void check_binary(std::span<const double> scores, std::span<const double> labels, const char* what) {
  if (scores.size() != labels.size()) throw ShapeError(std::string(what) + ": scores and labels differ in length");
  for (double y : labels)
    if (y != 0.0 && y != 1.0) throw ArgumentError(std::string(what) + ": labels must be 0 or 1");
  for (double s : scores)
    if (std::isnan(s)) throw ArgumentError(std::string(what) + ": NaN score");
}

std::vector<std::size_t> ascending_order(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const double> labels) {
  check_binary(scores, labels, "auc_roc");
  const auto order = ascending_order(scores);
  double concordant = 0.0;  // in halves-exact arithmetic
  double neg_below = 0.0;
  double n_pos = 0.0, n_neg = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double pos = 0.0, neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1.0 ? pos : neg) += 1.0;
      ++j;
    }
    concordant += pos * neg_below + 0.5 * pos * neg;
    neg_below += neg;
    n_pos += pos;
    n_neg += neg;
    i = j;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw MetricUndefined("auc_roc needs both classes");
  return concordant / (n_pos * n_neg);
}

double auc_pr(std::span<const double> scores, std::span<const double> labels) {
  check_binary(scores, labels, "auc_pr");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<double> precision(scores.size(), 0.0);
  std::size_t seen = 0, hits = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1.0) ++hits;
      ++j;
    }
    seen = j;
    const double p = static_cast<double>(hits) / static_cast<double>(seen);
    for (std::size_t k = i; k < j; ++k) precision[order[k]] = p;
    i = j;
  }
  if (hits == 0) throw MetricUndefined("auc_pr needs at least one positive");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (labels[i] == 1.0) total += precision[i];
  return total / static_cast<double>(hits);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const auto order = ascending_order(values);
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("spearman: inputs differ in length");
  if (a.size() < 2) throw MetricUndefined("spearman needs at least two values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean, db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw MetricUndefined("spearman undefined for constant input");
  return sab / std::sqrt(saa * sbb);
}

double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const std::unordered_set<std::size_t> sa(a.begin(), a.end());
  const std::unordered_set<std::size_t> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (auto v : sa) inter += sb.count(v);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

HistogramComparison uncertainty_histogram_compare(std::span<const double> teacher, std::span<const double> student,
                                                  std::size_t n_bins) {
  if (teacher.size() != student.size()) throw ShapeError("histogram compare: inputs differ in length");
  if (n_bins == 0) throw ArgumentError("histogram compare: n_bins must be positive");
  if (teacher.empty()) throw ArgumentError("histogram compare: empty input");
  HistogramComparison out;
  const auto [tmin, tmax] = std::minmax_element(teacher.begin(), teacher.end());
  const auto [smin, smax] = std::minmax_element(student.begin(), student.end());
  const double lo = std::min(*tmin, *smin);
  double hi = std::max(*tmax, *smax);
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t b = 0; b <= n_bins; ++b) out.edges.push_back(lo + width * static_cast<double>(b));
  out.edges.back() = hi;

  auto fill = [&](std::span<const double> v, std::vector<std::size_t>& counts) {
    counts.assign(n_bins, 0);
    for (double x : v) {
      auto bin = static_cast<std::size_t>((x - lo) / width);
      ++counts[std::min(bin, n_bins - 1)];
    }
  };
  fill(teacher, out.teacher_counts);
  fill(student, out.student_counts);
  try {
    out.spearman = spearman(teacher, student);
    out.spearman_defined = true;
  } catch (const MetricUndefined&) {
    out.spearman = std::nan("");
  }
  return out;
}

}  // namespace daum
