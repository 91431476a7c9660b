#pragma once

#include "daum/core/params.hpp"
#include "daum/core/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace daum {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { identity, relu, sigmoid };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

struct LayerSpec {
  std::size_t in_dim = 1;
  std::size_t out_dim = 1;
  Activation activation = Activation::identity;
};

double sigmoid(double x);
double softplus(double x);

/// Activations of one batched pass, kept for backprop. inputs[0] is the batch
/// fed to the stack; outputs[l] is layer l after its activation.
struct DenseCache {
  Matrix input;
  std::vector<Matrix> outputs;
};

/// A chain of affine layers whose weights live at a fixed offset inside some
/// larger ParamVector. Weights are stored row-major (out x in) followed by the
/// bias (out).
class DenseStack {
 public:
  DenseStack() = default;

  /// Registers the stack's weights in `layout` under `prefix` and returns the
  /// stack bound to the resulting offsets.
  static DenseStack register_in(ParamLayout& layout, const std::string& prefix,
                                std::vector<LayerSpec> layers);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t in_dim() const { return layers_.front().in_dim; }
  std::size_t out_dim() const { return layers_.back().out_dim; }
  std::size_t param_count() const;

  /// Batched forward over rows of `x`. `cache` may be null for inference.
  Matrix forward(const double* params, const Matrix& x, DenseCache* cache) const;

  /// Accumulates dLoss/dparams into `grad` and optionally returns dLoss/dinput.
  void backward(const double* params, const DenseCache& cache, const Matrix& upstream,
                double* grad, Matrix* input_grad) const;

  /// He-scaled Gaussian weights, zero biases.
  void init_he(double* params, Rng& rng) const;

 private:
  struct Offsets {
    std::size_t weight;
    std::size_t bias;
  };
  std::vector<LayerSpec> layers_;
  std::vector<Offsets> offsets_;
};

/// Plain feed-forward network: layer specs plus parameters.
struct Mlp {
  std::vector<LayerSpec> layers;
  DenseStack stack;
  ParamVector params;
};

/// Builds an Mlp with validated specs; parameters are zero unless `seed` is given.
Mlp make_mlp(std::vector<LayerSpec> layers, std::optional<std::uint64_t> seed = std::nullopt);

std::vector<double> forward(const Mlp& net, std::span<const double> x);

/// Gradient of <upstream, f(x)> with respect to the parameters.
ParamVector backward(const Mlp& net, std::span<const double> x, std::span<const double> upstream_grad);

}  // namespace daum
