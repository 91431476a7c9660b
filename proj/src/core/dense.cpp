#include "daum/core/dense.hpp"

#include "daum/core/errors.hpp"

#include <cmath>

namespace daum {

namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;
using MutRowMap = Eigen::Map<Eigen::RowVectorXd>;

void apply_activation(Matrix& z, Activation a) {
  switch (a) {
    case Activation::identity:
      break;
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::sigmoid:
      z = z.unaryExpr([](double v) { return sigmoid(v); });
      break;
  }
}

// Multiplies `upstream` in place by the activation derivative expressed
// through the post-activation output.
void activation_backward(Matrix& upstream, const Matrix& out, Activation a) {
  switch (a) {
    case Activation::identity:
      break;
    case Activation::relu:
      upstream = (out.array() > 0.0).select(upstream, 0.0);
      break;
    case Activation::sigmoid:
      upstream = upstream.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
      break;
  }
}

void validate_chain(const std::vector<LayerSpec>& layers) {
  if (layers.empty()) throw ShapeError("dense stack needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].in_dim == 0 || layers[l].out_dim == 0)
      throw ShapeError("layer dimensions must be positive");
    if (l > 0 && layers[l].in_dim != layers[l - 1].out_dim)
      throw ShapeError("layer " + std::to_string(l) + " input does not match previous output");
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::sigmoid:
      return "sigmoid";
  }
  return "identity";
}

Activation activation_from_string(std::string_view s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  throw ArgumentError("unknown activation: " + std::string(s));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

DenseStack DenseStack::register_in(ParamLayout& layout, const std::string& prefix,
                                   std::vector<LayerSpec> layers) {
  validate_chain(layers);
  DenseStack stack;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string base = prefix + ".dense" + std::to_string(l);
    Offsets off{};
    off.weight = layout.add(base + ".weight", layers[l].out_dim, layers[l].in_dim);
    off.bias = layout.add(base + ".bias", 1, layers[l].out_dim);
    stack.offsets_.push_back(off);
  }
  stack.layers_ = std::move(layers);
  return stack;
}

std::size_t DenseStack::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.out_dim * (l.in_dim + 1);
  return n;
}

Matrix DenseStack::forward(const double* params, const Matrix& x, DenseCache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != in_dim())
    throw ShapeError("dense forward: input width " + std::to_string(x.cols()) + " != " +
                     std::to_string(in_dim()));
  if (cache != nullptr) {
    cache->input = x;
    cache->outputs.resize(layers_.size());
  }
  Matrix current;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    ConstMap w(params + offsets_[l].weight, layer.out_dim, layer.in_dim);
    ConstRowMap b(params + offsets_[l].bias, layer.out_dim);
    Matrix z(x.rows(), layer.out_dim);
    if (l == 0)
      z.noalias() = x * w.transpose();
    else
      z.noalias() = current * w.transpose();
    z.rowwise() += b;
    apply_activation(z, layer.activation);
    if (cache != nullptr) cache->outputs[l] = z;
    current = std::move(z);
  }
  return current;
}

void DenseStack::backward(const double* params, const DenseCache& cache, const Matrix& upstream,
                          double* grad, Matrix* input_grad) const {
  if (cache.outputs.size() != layers_.size())
    throw ShapeError("dense backward: cache does not belong to this stack");
  if (upstream.rows() != cache.input.rows() ||
      static_cast<std::size_t>(upstream.cols()) != out_dim())
    throw ShapeError("dense backward: upstream gradient has wrong shape");

  Matrix delta = upstream;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    activation_backward(delta, cache.outputs[li], layer.activation);
    const Matrix& in = li == 0 ? cache.input : cache.outputs[li - 1];
    MutMap dw(grad + offsets_[li].weight, layer.out_dim, layer.in_dim);
    MutRowMap db(grad + offsets_[li].bias, layer.out_dim);
    dw.noalias() += delta.transpose() * in;
    db += delta.colwise().sum();
    if (li > 0 || input_grad != nullptr) {
      ConstMap w(params + offsets_[li].weight, layer.out_dim, layer.in_dim);
      Matrix next = delta * w;
      delta = std::move(next);
    }
  }
  if (input_grad != nullptr) *input_grad = std::move(delta);
}

void DenseStack::init_he(double* params, Rng& rng) const {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.in_dim));
    double* w = params + offsets_[l].weight;
    for (std::size_t i = 0; i < layer.out_dim * layer.in_dim; ++i) w[i] = scale * rng.normal();
    double* b = params + offsets_[l].bias;
    for (std::size_t i = 0; i < layer.out_dim; ++i) b[i] = 0.0;
  }
}

Mlp make_mlp(std::vector<LayerSpec> layers, std::optional<std::uint64_t> seed) {
  auto layout = std::make_shared<ParamLayout>();
  Mlp net;
  net.stack = DenseStack::register_in(*layout, "mlp", layers);
  net.layers = std::move(layers);
  net.params = ParamVector(layout);
  if (seed) {
    Rng rng(*seed);
    net.stack.init_he(net.params.data(), rng);
  }
  return net;
}

std::vector<double> forward(const Mlp& net, std::span<const double> x) {
  if (x.size() != net.stack.in_dim())
    throw ShapeError("forward: input has " + std::to_string(x.size()) + " entries, expected " +
                     std::to_string(net.stack.in_dim()));
  if (net.params.size() != net.stack.param_count())
    throw ShapeError("forward: parameters do not match layer specs");
  Matrix in = Eigen::Map<const Matrix>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  Matrix out = net.stack.forward(net.params.data(), in, nullptr);
  return {out.data(), out.data() + out.size()};
}

ParamVector backward(const Mlp& net, std::span<const double> x, std::span<const double> upstream_grad) {
  if (x.size() != net.stack.in_dim() || upstream_grad.size() != net.stack.out_dim())
    throw ShapeError("backward: input or upstream gradient has wrong size");
  Matrix in = Eigen::Map<const Matrix>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  DenseCache cache;
  net.stack.forward(net.params.data(), in, &cache);
  Matrix up = Eigen::Map<const Matrix>(upstream_grad.data(), 1,
                                       static_cast<Eigen::Index>(upstream_grad.size()));
  ParamVector grad(net.params.layout_ptr());
  net.stack.backward(net.params.data(), cache, up, grad.data(), nullptr);
  return grad;
}

}  // namespace daum
