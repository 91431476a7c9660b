#include "daum/core/errors.hpp"
#include "daum/core/rng.hpp"
#include "daum/swag.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace daum;

namespace {

LayoutPtr vector_layout(std::size_t d, const std::string& name = "w") {
  auto layout = std::make_shared<ParamLayout>();
  layout->add(name, d, 1);
  return layout;
}

ParamVector vec(const LayoutPtr& layout, std::vector<double> v) { return ParamVector(layout, std::move(v)); }

SnapshotBuffer random_buffer(std::size_t d, std::size_t k, std::uint64_t seed) {
  auto layout = vector_layout(d);
  Rng rng(seed);
  SnapshotBuffer buf(k);
  for (std::size_t s = 0; s < k; ++s) {
    std::vector<double> v(d);
    rng.fill_normal(v);
    buf.push(vec(layout, v));
  }
  return buf;
}

}  // namespace

TEST(SnapshotBuffer, EvictsOldestWhenFull) {
  auto layout = vector_layout(1);
  SnapshotBuffer buf(3);
  for (int i = 0; i < 4; ++i) {
    buf.push(vec(layout, {double(i)}));
    EXPECT_EQ(buf.size(), std::min<std::size_t>(i + 1, 3));
  }
  EXPECT_EQ(buf.snapshots().front()[0], 1.0);
  EXPECT_EQ(buf.snapshots().back()[0], 3.0);
  EXPECT_TRUE(buf.full());
}

TEST(SnapshotBuffer, StoresByValue) {
  auto layout = vector_layout(2);
  SnapshotBuffer buf(2);
  auto p = vec(layout, {1.0, 2.0});
  buf.push(p);
  p[0] = 99.0;
  EXPECT_EQ(buf.snapshots().front()[0], 1.0);
}

TEST(SnapshotBuffer, RejectsLayoutMismatchAndZeroCapacity) {
  SnapshotBuffer buf(2);
  buf.push(vec(vector_layout(2), {0, 0}));
  EXPECT_THROW(buf.push(vec(vector_layout(3), {0, 0, 0})), ShapeError);
  EXPECT_THROW(SnapshotBuffer(0), ArgumentError);
}

TEST(FitPosterior, IdenticalSnapshotsAreDegenerate) {
  auto layout = vector_layout(3);
  SnapshotBuffer buf(4);
  for (int i = 0; i < 4; ++i) buf.push(vec(layout, {0.5, -1.0, 2.0}));
  const auto post = fit_posterior(buf, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(post.mean[i], buf.snapshots().front()[i]);
    EXPECT_EQ(post.diag_var[i], 0.0);
  }
  EXPECT_EQ(post.deviations.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FitPosterior, TwoSnapshotHandExample) {
  auto layout = vector_layout(1);
  SnapshotBuffer buf(2);
  buf.push(vec(layout, {0.0}));
  buf.push(vec(layout, {2.0}));
  const auto post = fit_posterior(buf, 1);
  EXPECT_DOUBLE_EQ(post.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(post.diag_var[0], 1.0);
  EXPECT_DOUBLE_EQ(post.deviations(0, 0), 1.0);
  EXPECT_EQ(post.scale_k(), 2u);
}

TEST(FitPosterior, MeanMatchesStreamingOracle) {
  const auto buf = random_buffer(7, 12, 3);
  const auto post = fit_posterior(buf, 10);
  std::vector<double> running(7, 0.0);
  std::size_t n = 0;
  for (const auto& s : buf.snapshots()) {
    ++n;
    for (std::size_t i = 0; i < 7; ++i) running[i] += (s[i] - running[i]) / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(post.mean[i], running[i], 1e-13);
    double ss = 0.0;
    for (const auto& s : buf.snapshots()) ss += (s[i] - running[i]) * (s[i] - running[i]);
    EXPECT_NEAR(post.diag_var[i], ss / 12.0, 1e-12);
  }
  // Deviation columns are the last `rank` snapshots minus the mean, oldest first.
  for (std::size_t c = 0; c < 10; ++c) {
    const auto& s = buf.snapshots()[2 + c];
    for (std::size_t i = 0; i < 7; ++i)
      EXPECT_NEAR(post.deviations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), s[i] - running[i], 1e-12);
  }
}

TEST(FitPosterior, PushThenEvictLeavesFitUnchanged) {
  auto buf = random_buffer(4, 5, 8);
  const auto before = fit_posterior(buf, 3);
  // Re-pushing the snapshot order through a fresh buffer with one extra leading entry.
  SnapshotBuffer other(5);
  other.push(vec(vector_layout(4), {9, 9, 9, 9}));
  for (const auto& s : buf.snapshots()) other.push(s);
  const auto after = fit_posterior(other, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(before.mean[i], after.mean[i]);
    EXPECT_EQ(before.diag_var[i], after.diag_var[i]);
  }
  EXPECT_EQ(before.deviations, after.deviations);
}

TEST(FitPosterior, Errors) {
  auto layout = vector_layout(1);
  SnapshotBuffer buf(3);
  buf.push(vec(layout, {1.0}));
  EXPECT_THROW(fit_posterior(buf, 1), StateError);
  buf.push(vec(layout, {2.0}));
  buf.push(vec(layout, {3.0}));
  EXPECT_THROW(fit_posterior(buf, 0), ArgumentError);
  EXPECT_THROW(fit_posterior(buf, 3), ArgumentError);
  EXPECT_NO_THROW(fit_posterior(buf, 2));
}

TEST(SampleWeights, DegeneratePosteriorReturnsMean) {
  auto layout = vector_layout(3);
  SnapshotBuffer buf(3);
  for (int i = 0; i < 3; ++i) buf.push(vec(layout, {1.0, -2.0, 0.25}));
  const auto post = fit_posterior(buf, 2);
  const auto w = sample_weights(post, 17);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(w[i], post.mean[i]);
}

TEST(SampleWeights, SameSeedIsBitReproducible) {
  const auto post = fit_posterior(random_buffer(20, 6, 1), 4);
  const auto a = sample_weights(post, 99);
  const auto b = sample_weights(post, 99);
  const auto c = sample_weights(post, 100);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a[i], b[i]);
  bool differs = false;
  for (std::size_t i = 0; i < 20; ++i) differs |= a[i] != c[i];
  EXPECT_TRUE(differs);
}

TEST(SampleWeights, MonteCarloMomentsMatchClosedForm) {
  constexpr std::size_t d = 4;
  constexpr std::size_t rank = 3;
  constexpr std::size_t draws = 100000;
  const auto post = fit_posterior(random_buffer(d, 5, 12), rank);
  Eigen::VectorXd mu(d);
  for (std::size_t i = 0; i < d; ++i) mu(static_cast<Eigen::Index>(i)) = post.mean[i];
  Eigen::MatrixXd cov = post.deviations * post.deviations.transpose() / (2.0 * double(post.scale_k() - 1));
  for (std::size_t i = 0; i < d; ++i) cov(Eigen::Index(i), Eigen::Index(i)) += 0.5 * post.diag_var[i];

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> w(d);
  for (std::size_t m = 0; m < draws; ++m) {
    sample_weights_into(post, derive_seed(5, m), w);
    const Eigen::Map<const Eigen::VectorXd> v(w.data(), d);
    sum += v;
    outer += (v - mu) * (v - mu).transpose();
  }
  const Eigen::VectorXd mean = sum / double(draws);
  const Eigen::MatrixXd emp = outer / double(draws);
  for (Eigen::Index i = 0; i < Eigen::Index(d); ++i) {
    const double se = std::sqrt(cov(i, i) / double(draws));
    EXPECT_LT(std::abs(mean(i) - mu(i)), 4.0 * se) << "coordinate " << i;
  }
  EXPECT_LT((emp - cov).norm() / cov.norm(), 0.05);
}

TEST(SwagScope, ParsesNames) {
  EXPECT_EQ(swag_scope_from_string("all"), SwagScope::all);
  EXPECT_EQ(swag_scope_from_string("backbone_only"), SwagScope::backbone_only);
  EXPECT_EQ(to_string(SwagScope::backbone_only), "backbone_only");
  EXPECT_THROW(swag_scope_from_string("heads"), ConfigError);
}
