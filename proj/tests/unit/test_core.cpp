#include "daum/core/dense.hpp"
#include "daum/core/errors.hpp"
#include "daum/core/grad_check.hpp"
#include "daum/core/rng.hpp"
#include "daum/core/train_config.hpp"
#include "daum/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace daum;

namespace {

// Explicit-loop forward pass over the layout's row-major weights.
std::vector<double> loop_forward(const Mlp& net, std::vector<double> x) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto w = net.params.segment("mlp.dense" + std::to_string(l) + ".weight");
    const auto b = net.params.segment("mlp.dense" + std::to_string(l) + ".bias");
    std::vector<double> y(layer.out_dim);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < layer.in_dim; ++i) acc += w[o * layer.in_dim + i] * x[i];
      switch (layer.activation) {
        case Activation::identity: y[o] = acc; break;
        case Activation::relu: y[o] = acc > 0 ? acc : 0; break;
        case Activation::sigmoid: y[o] = 1.0 / (1.0 + std::exp(-acc)); break;
      }
    }
    x = y;
  }
  return x;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  rng.fill_normal(v);
  return v;
}

}  // namespace

TEST(Forward, ZeroWeightsSigmoidGiveHalf) {
  auto net = make_mlp({{3, 4, Activation::relu}, {4, 2, Activation::sigmoid}});
  const auto y = forward(net, std::vector<double>{1.0, -2.0, 3.0});
  ASSERT_EQ(y.size(), 2u);
  for (double v : y) EXPECT_EQ(v, 0.5);
}

TEST(Forward, IdentityWeightsReturnInput) {
  auto net = make_mlp({{3, 3, Activation::identity}});
  auto w = net.params.segment("mlp.dense0.weight");
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  const std::vector<double> x{0.25, -1.5, 7.0};
  EXPECT_EQ(forward(net, x), x);
}

TEST(Forward, MatchesExplicitLoopOracle) {
  auto net = make_mlp({{5, 7, Activation::relu}, {7, 3, Activation::sigmoid}}, 42);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = random_vector(5, 100 + s);
    const auto got = forward(net, x);
    const auto want = loop_forward(net, x);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
  }
}

TEST(Forward, DimensionMismatchThrows) {
  auto net = make_mlp({{3, 2, Activation::identity}});
  EXPECT_THROW(forward(net, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST(Forward, IsBitReproducible) {
  auto net = make_mlp({{6, 8, Activation::relu}, {8, 2, Activation::identity}}, 3);
  const auto x = random_vector(6, 9);
  EXPECT_EQ(forward(net, x), forward(net, x));
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  auto net = make_mlp({{4, 5, Activation::relu}, {5, 2, Activation::sigmoid}}, 1);
  const auto g = backward(net, random_vector(4, 2), std::vector<double>{0.0, 0.0});
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(g.same_layout(net.params));
}

TEST(Backward, SigmoidBceLogitGradientIsResidual) {
  // One sigmoid unit with weight w on scalar input x: dBCE/dw = (sigma(wx) - y) x.
  auto net = make_mlp({{1, 1, Activation::identity}});
  net.params.segment("mlp.dense0.weight")[0] = 0.7;
  const double x = 1.3;
  for (double y : {0.0, 1.0}) {
    const double f = forward(net, std::vector<double>{x})[0];
    const double dlogit = bce_logit_grad(sigmoid(f), y);
    EXPECT_DOUBLE_EQ(dlogit, sigmoid(0.7 * x) - y);
    const auto g = backward(net, std::vector<double>{x}, std::vector<double>{dlogit});
    EXPECT_NEAR(g.segment("mlp.dense0.weight")[0], (sigmoid(0.7 * x) - y) * x, 1e-15);
    EXPECT_NEAR(g.segment("mlp.dense0.bias")[0], sigmoid(0.7 * x) - y, 1e-15);
  }
}

TEST(Backward, ShapeMismatchThrows) {
  auto net = make_mlp({{3, 2, Activation::identity}});
  EXPECT_THROW(backward(net, std::vector<double>{1, 2, 3}, std::vector<double>{1.0}), ShapeError);
}

class FiniteDifferenceGrid : public ::testing::TestWithParam<int> {};

TEST_P(FiniteDifferenceGrid, AnalyticMatchesCentralDifferences) {
  const int variant = GetParam();
  const std::vector<std::vector<LayerSpec>> grid = {
      {{4, 1, Activation::identity}},
      {{4, 1, Activation::sigmoid}},
      {{3, 6, Activation::relu}, {6, 2, Activation::identity}},
      {{3, 6, Activation::sigmoid}, {6, 4, Activation::relu}, {4, 2, Activation::sigmoid}},
      {{8, 3, Activation::identity}, {3, 3, Activation::sigmoid}},
  };
  const auto& layers = grid[static_cast<std::size_t>(variant)];
  auto net = make_mlp(layers, 11 + static_cast<std::uint64_t>(variant));
  const auto x = random_vector(layers.front().in_dim, 5);
  const auto up = random_vector(layers.back().out_dim, 6);
  auto loss = [&](const ParamVector& p) {
    Mlp probe = net;
    probe.params = p;
    const auto y = forward(probe, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += up[i] * y[i];
    return acc;
  };
  const auto report = grad_check(net.params, loss, backward(net, x, up), {1e-5, 1e-6, 1e-3});
  EXPECT_TRUE(report.passed) << "max rel error " << report.max_rel_error << " at " << report.worst_index;
  EXPECT_EQ(report.n_checked, net.params.size());
}

INSTANTIATE_TEST_SUITE_P(LayerGrid, FiniteDifferenceGrid, ::testing::Range(0, 5));

TEST(GradCheck, LinearLogisticPasses) {
  auto net = make_mlp({{5, 1, Activation::identity}}, 8);
  const auto x = random_vector(5, 1);
  const double y = 1.0;
  auto loss = [&](const ParamVector& p) {
    Mlp probe = net;
    probe.params = p;
    return bce(sigmoid(forward(probe, x)[0]), y);
  };
  const double q = sigmoid(forward(net, x)[0]);
  const auto analytic = backward(net, x, std::vector<double>{q - y});
  EXPECT_TRUE(grad_check(net.params, loss, analytic, {1e-5, 1e-6, 1e-3}).passed);
}

TEST(GradCheck, CorruptedEntryFails) {
  auto net = make_mlp({{5, 1, Activation::identity}}, 8);
  const auto x = random_vector(5, 1);
  auto loss = [&](const ParamVector& p) {
    Mlp probe = net;
    probe.params = p;
    return bce(sigmoid(forward(probe, x)[0]), 0.0);
  };
  const double q = sigmoid(forward(net, x)[0]);
  auto analytic = backward(net, x, std::vector<double>{q});
  analytic[2] *= 2.0;
  const auto report = grad_check(net.params, loss, analytic);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.worst_index, 2u);
}

TEST(GradCheck, EmptyParametersPassVacuously) {
  auto layout = std::make_shared<const ParamLayout>();
  ParamVector empty(layout);
  const auto report = grad_check(empty, [](const ParamVector&) { return 0.0; }, empty);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.n_checked, 0u);
}

TEST(GradCheck, NonPositiveStepThrows) {
  auto net = make_mlp({{2, 1, Activation::identity}});
  EXPECT_THROW(grad_check(net.params, [](const ParamVector&) { return 0.0; }, net.params, {0.0, 1e-6, 1e-3}),
               ArgumentError);
}

namespace {

ParamVector two_vector(double a, double b) {
  auto layout = std::make_shared<ParamLayout>();
  layout->add("w", 1, 2);
  return ParamVector(layout, {a, b});
}

}  // namespace

TEST(SgdStep, HandArithmetic) {
  const auto w = two_vector(1.0, 2.0);
  const ParamVector g(w.layout_ptr(), {1.0, -1.0});
  const auto out = sgd_step(w, g, 0.5);
  EXPECT_EQ(out[0], 0.5);
  EXPECT_EQ(out[1], 2.5);
  EXPECT_TRUE(out.same_layout(w));
}

TEST(SgdStep, ZeroRateOrZeroGradientLeavesParams) {
  const auto w = two_vector(1.0, 2.0);
  const ParamVector g(w.layout_ptr(), {3.0, 4.0});
  const ParamVector zero(w.layout_ptr());
  const auto frozen = sgd_step(w, g, 0.0);
  EXPECT_EQ(frozen[0], 1.0);
  EXPECT_EQ(frozen[1], 2.0);
  const auto same = sgd_step(w, zero, 0.7);
  EXPECT_EQ(same[0], 1.0);
  EXPECT_EQ(same[1], 2.0);
}

TEST(SgdStep, LayoutMismatchThrows) {
  const auto w = two_vector(1.0, 2.0);
  auto layout = std::make_shared<ParamLayout>();
  layout->add("v", 2, 1);
  const ParamVector other(layout, {0.0, 0.0});
  EXPECT_THROW(sgd_step(w, other, 0.1), ShapeError);
}

TEST(ParamLayout, RejectsDuplicateNames) {
  ParamLayout layout;
  layout.add("a", 2, 3);
  EXPECT_THROW(layout.add("a", 1, 1), ShapeError);
  EXPECT_EQ(layout.size(), 6u);
}

TEST(ParamVector, LengthMustMatchLayout) {
  auto layout = std::make_shared<ParamLayout>();
  layout->add("w", 2, 2);
  EXPECT_THROW(ParamVector(layout, {1.0, 2.0}), ShapeError);
}

TEST(TrainConfig, ValidatesFields) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Rng, SeedsAreReproducibleAndStreamsDiffer) {
  Rng a(5), b(5), c(derive_seed(5, 1));
  for (int i = 0; i < 10; ++i) {
    const double va = a.normal();
    EXPECT_EQ(va, b.normal());
    EXPECT_NE(va, c.normal());
  }
}
