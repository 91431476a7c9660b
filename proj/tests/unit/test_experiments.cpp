#include "daum/core/errors.hpp"
#include "daum/core/rng.hpp"
#include "daum/experiments.hpp"
#include "daum/latency.hpp"
#include "daum/metrics.hpp"
#include "daum/ranking.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace daum;

namespace {

struct Fixture {
  Matrix labels;
  UncertaintyBatch reports;
};

// Funnel labels with means correlated to labels and variance peaking near 0.5.
Fixture make_fixture(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Fixture f;
  f.labels = Matrix::Zero(n, 4);
  f.reports.mean = Matrix(n, 4);
  f.reports.variance = Matrix(n, 4);
  f.reports.n_samples = 11;
  const double rates[4] = {0.5, 0.6, 0.3, 0.4};
  for (Eigen::Index i = 0; i < n; ++i) {
    bool alive = true;
    for (Eigen::Index t = 0; t < 4; ++t) {
      alive = alive && rng.bernoulli(rates[t]);
      f.labels(i, t) = alive ? 1.0 : 0.0;
      const double mu = std::clamp(0.15 + 0.5 * f.labels(i, t) + 0.3 * (rng.uniform() - 0.5), 0.0, 1.0);
      f.reports.mean(i, t) = mu;
      f.reports.variance(i, t) = mu * (1 - mu) * 0.1 * rng.uniform();
    }
    f.reports.ids.push_back(i);
  }
  return f;
}

std::vector<double> column(const Matrix& m, std::size_t t) {
  const auto c = m.col(Eigen::Index(t));
  return {c.begin(), c.end()};
}

}  // namespace

TEST(ResidualPassing, RatioZeroEqualsFullMetrics) {
  const auto f = make_fixture(500, 1);
  const auto curve = residual_passing_experiment(f.labels, f.reports, kClick, kDeal, {0.0, 0.1});
  ASSERT_EQ(curve.rows.size(), 2u);
  const auto& r0 = curve.rows[0];
  EXPECT_EQ(r0.n_passed, 0u);
  EXPECT_TRUE(r0.residual_defined);
  EXPECT_EQ(r0.residual_auc_roc, auc_roc(column(f.reports.mean, kDeal), column(f.labels, kDeal)));
  EXPECT_EQ(r0.residual_auc_pr, auc_pr(column(f.reports.mean, kDeal), column(f.labels, kDeal)));
  EXPECT_EQ(r0.directly_passed_positives, 0u);
}

TEST(ResidualPassing, RemovesExactlyCeilRatioTimesN) {
  const auto f = make_fixture(333, 2);
  const std::vector<double> ratios{0.0, 0.01, 0.05, 0.2, 0.5};
  const auto curve = residual_passing_experiment(f.labels, f.reports, kOnline, kOnline, ratios);
  for (std::size_t i = 0; i < ratios.size(); ++i)
    EXPECT_EQ(curve.rows[i].n_passed, static_cast<std::size_t>(std::ceil(ratios[i] * 333 - 1e-9)));
  // The residual metric is computed on exactly the non-passed instances.
  const auto passed = top_k_mask(column(f.reports.variance, kOnline), curve.rows[3].n_passed);
  std::vector<double> s, y;
  for (Eigen::Index i = 0; i < 333; ++i)
    if (!passed[std::size_t(i)]) {
      s.push_back(f.reports.mean(i, kOnline));
      y.push_back(f.labels(i, kOnline));
    }
  EXPECT_EQ(curve.rows[3].residual_auc_roc, auc_roc(s, y));
}

TEST(ResidualPassing, RejectsUnsortedRatiosAndCoverageGap) {
  const auto f = make_fixture(50, 3);
  EXPECT_THROW(residual_passing_experiment(f.labels, f.reports, 0, 0, {0.2, 0.1}), ArgumentError);
  EXPECT_THROW(residual_passing_experiment(f.labels.topRows(40), f.reports, 0, 0, {0.1}), DataError);
}

TEST(DownstreamPositives, CountsMatchDefinition) {
  const auto f = make_fixture(400, 4);
  const auto curve = downstream_positive_experiment(f.labels, f.reports, kClick, {0.0, 0.25});
  EXPECT_EQ(curve.rows[0].directly_passed_positives, 0u);
  for (const auto& row : curve.rows) {
    const auto passed = top_k_mask(column(f.reports.variance, kClick), row.n_passed);
    std::size_t direct = 0, residual = 0;
    for (Eigen::Index i = 0; i < 400; ++i) {
      if (f.labels(i, kDeal) != 1.0) continue;
      if (passed[std::size_t(i)])
        ++direct;
      else if (f.reports.mean(i, kDeal) > 0.5)
        ++residual;
    }
    EXPECT_EQ(row.directly_passed_positives, direct);
    EXPECT_EQ(row.residual_classified_positives, residual);
    EXPECT_EQ(row.total_downstream_positives, direct + residual);
  }
}

TEST(FixedBudget, ZeroBudgetTiesAtResidualCount) {
  const auto f = make_fixture(300, 5);
  const auto rows = fixed_passed_positives_experiment(f.labels, f.reports, {kClick, kOnline, kDeal}, {0});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.reachable);
    EXPECT_EQ(r.total_downstream_positives, rows[0].total_downstream_positives);
  }
}

TEST(FixedBudget, HitsBudgetWithSmallestCountDeterministically) {
  const auto f = make_fixture(300, 6);
  const auto a = fixed_passed_positives_experiment(f.labels, f.reports, {kClick, kDeal}, {1, 5, 100000});
  const auto b = fixed_passed_positives_experiment(f.labels, f.reports, {kClick, kDeal}, {1, 5, 100000});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].n_passed, b[i].n_passed);
    EXPECT_EQ(a[i].reachable, b[i].reachable);
    if (a[i].budget == 100000) {
      EXPECT_FALSE(a[i].reachable);
      continue;
    }
    ASSERT_TRUE(a[i].reachable);
    const auto v = column(f.reports.variance, a[i].pass_task);
    auto direct_at = [&](std::size_t k) {
      const auto mask = top_k_mask(v, k);
      std::size_t d = 0;
      for (Eigen::Index r = 0; r < 300; ++r) d += mask[std::size_t(r)] && f.labels(r, kDeal) == 1.0;
      return d;
    };
    EXPECT_EQ(direct_at(a[i].n_passed), a[i].budget);
    EXPECT_LT(direct_at(a[i].n_passed - 1), a[i].budget);
  }
}

TEST(LinearFit, ExactLineAndNoise) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v + 2.0);
  const auto fit = linear_fit(x, y);
  EXPECT_NEAR(fit.slope, 3.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 2.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_THROW(linear_fit(std::vector<double>{1, 1}, std::vector<double>{2, 3}), DomainError);
  EXPECT_THROW(linear_fit(std::vector<double>{1}, std::vector<double>{2}), ArgumentError);
}

TEST(MedianMs, TimesTheCallable) {
  int calls = 0;
  const double ms = median_ms([&] { ++calls; }, {.repetitions = 7, .warmups = 2});
  EXPECT_EQ(calls, 9);
  EXPECT_GE(ms, 0.0);
  EXPECT_THROW(median_ms([] {}, {.repetitions = 0, .warmups = 0}), ArgumentError);
}
