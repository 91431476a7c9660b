#include "daum/ple.hpp"

#include "daum/core/errors.hpp"
#include "daum/losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace daum {

std::string task_name(std::size_t t) {
  if (t < kTaskNames.size()) return std::string(kTaskNames[t]);
  return "task" + std::to_string(t);
}

std::size_t task_from_string(std::string_view s, std::size_t n_tasks) {
  for (std::size_t t = 0; t < n_tasks; ++t)
    if (s == task_name(t)) return t;
  if (s == "click") return kClick;
  if (s == "cart") return kCart;
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec == std::errc() && ptr == s.data() + s.size() && idx < n_tasks) return idx;
  throw ArgumentError("unknown task: " + std::string(s));
}

void PleConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string("ple: ") + what + " must be positive");
  };
  positive(input_dim, "input_dim");
  positive(n_tasks, "n_tasks");
  positive(n_shared_experts, "n_shared_experts");
  positive(experts_per_task, "experts_per_task");
  if (expert_dims.empty()) throw ConfigError("ple: expert_dims must not be empty");
  if (tower_dims.empty() || tower_dims.back() != 1)
    throw ConfigError("ple: tower_dims must end with 1");
  for (auto d : expert_dims) positive(d, "expert width");
  for (auto d : gate_dims) positive(d, "gate width");
  for (auto d : tower_dims) positive(d, "tower width");
}

ParamRole role_of(const LayoutEntry& entry) {
  return entry.name.starts_with("heads.") ? ParamRole::head : ParamRole::backbone;
}

std::vector<bool> backbone_mask(const ParamLayout& layout) {
  std::vector<bool> mask(layout.size(), false);
  for (const auto& e : layout.entries())
    if (role_of(e) == ParamRole::backbone)
      for (std::size_t i = 0; i < e.size(); ++i) mask[e.offset + i] = true;
  return mask;
}

namespace {

std::vector<LayerSpec> chain(std::size_t in, const std::vector<std::size_t>& widths,
                             Activation hidden, Activation last) {
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    layers.push_back({in, widths[i], i + 1 == widths.size() ? last : hidden});
    in = widths[i];
  }
  return layers;
}

void softmax_rows(Matrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    const double m = row.maxCoeff();
    row = (row.array() - m).exp();
    row /= row.sum();
  }
}

}  // namespace

PleArchitecture::PleArchitecture(PleConfig config) : config_(std::move(config)) {
  config_.validate();
  auto layout = std::make_shared<ParamLayout>();
  const auto& c = config_;
  const auto expert_layers = chain(c.input_dim, c.expert_dims, Activation::relu, Activation::relu);
  for (std::size_t i = 0; i < c.n_shared_experts; ++i)
    shared_.push_back(DenseStack::register_in(*layout, "backbone.shared_expert." + std::to_string(i),
                                              expert_layers));
  task_experts_.resize(c.n_tasks);
  for (std::size_t t = 0; t < c.n_tasks; ++t)
    for (std::size_t j = 0; j < c.experts_per_task; ++j)
      task_experts_[t].push_back(DenseStack::register_in(
          *layout, "backbone.task_expert." + std::to_string(t) + "." + std::to_string(j),
          expert_layers));

  auto gate_widths = c.gate_dims;
  gate_widths.push_back(c.experts_per_gate());
  const auto gate_layers = chain(c.input_dim, gate_widths, Activation::relu, Activation::identity);
  for (std::size_t t = 0; t < c.n_tasks; ++t)
    gates_.push_back(DenseStack::register_in(*layout, "backbone.gate." + std::to_string(t), gate_layers));

  const auto tower_layers = chain(c.expert_width(), c.tower_dims, Activation::relu, Activation::identity);
  for (std::size_t t = 0; t < c.n_tasks; ++t)
    towers_.push_back(DenseStack::register_in(*layout, "heads.tower." + std::to_string(t), tower_layers));
  layout_ = std::move(layout);
}

const Matrix& PleArchitecture::expert_output(const Cache& cache, std::size_t task, std::size_t k) const {
  if (k < config_.n_shared_experts) return cache.shared[k].outputs.back();
  return cache.task_experts[task][k - config_.n_shared_experts].outputs.back();
}

Matrix PleArchitecture::forward_logits(const double* params, const Matrix& x, Cache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != config_.input_dim)
    throw ShapeError("ple: input has " + std::to_string(x.cols()) + " features, expected " +
                     std::to_string(config_.input_dim));
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;
  const std::size_t T = config_.n_tasks;
  const std::size_t E = config_.experts_per_gate();

  c.shared.assign(shared_.size(), {});
  for (std::size_t i = 0; i < shared_.size(); ++i) shared_[i].forward(params, x, &c.shared[i]);
  c.task_experts.assign(T, {});
  for (std::size_t t = 0; t < T; ++t) {
    c.task_experts[t].assign(task_experts_[t].size(), {});
    for (std::size_t j = 0; j < task_experts_[t].size(); ++j)
      task_experts_[t][j].forward(params, x, &c.task_experts[t][j]);
  }

  c.gates.assign(T, {});
  c.gate_weights.assign(T, {});
  c.towers.assign(T, {});
  Matrix logits(x.rows(), static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    Matrix g = gates_[t].forward(params, x, &c.gates[t]);
    softmax_rows(g);
    Matrix mix = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(config_.expert_width()));
    for (std::size_t k = 0; k < E; ++k)
      mix.noalias() += g.col(static_cast<Eigen::Index>(k)).asDiagonal() * expert_output(c, t, k);
    c.gate_weights[t] = std::move(g);
    logits.col(static_cast<Eigen::Index>(t)) = towers_[t].forward(params, mix, &c.towers[t]);
  }
  return logits;
}

Matrix PleArchitecture::gate_weights(const double* params, const Matrix& x, std::size_t task) const {
  if (task >= config_.n_tasks) throw ArgumentError("ple: task index out of range");
  Matrix g = gates_[task].forward(params, x, nullptr);
  softmax_rows(g);
  return g;
}

void PleArchitecture::backward(const double* params, const Cache& cache, const Matrix& dlogits,
                               double* grad) const {
  const std::size_t T = config_.n_tasks;
  const std::size_t E = config_.experts_per_gate();
  const Eigen::Index B = cache.gates.empty() ? 0 : cache.gates[0].input.rows();
  if (dlogits.rows() != B || static_cast<std::size_t>(dlogits.cols()) != T)
    throw ShapeError("ple backward: dlogits must be rows x n_tasks");

  const Eigen::Index H = static_cast<Eigen::Index>(config_.expert_width());
  std::vector<Matrix> d_shared(shared_.size(), Matrix::Zero(B, H));
  std::vector<std::vector<Matrix>> d_task(T);
  for (std::size_t t = 0; t < T; ++t) d_task[t].assign(task_experts_[t].size(), Matrix::Zero(B, H));

  for (std::size_t t = 0; t < T; ++t) {
    Matrix dmix;
    towers_[t].backward(params, cache.towers[t], dlogits.col(static_cast<Eigen::Index>(t)), grad, &dmix);

    const Matrix& g = cache.gate_weights[t];
    Matrix dg(B, static_cast<Eigen::Index>(E));
    for (std::size_t k = 0; k < E; ++k) {
      const Matrix& e = expert_output(cache, t, k);
      const auto kk = static_cast<Eigen::Index>(k);
      dg.col(kk) = dmix.cwiseProduct(e).rowwise().sum();
      Matrix& de = k < config_.n_shared_experts ? d_shared[k] : d_task[t][k - config_.n_shared_experts];
      de.noalias() += g.col(kk).asDiagonal() * dmix;
    }
    // Softmax Jacobian: dz_j = g_j * (dg_j - sum_k g_k dg_k).
    const Eigen::VectorXd inner = g.cwiseProduct(dg).rowwise().sum();
    Matrix dz = g.cwiseProduct((dg.colwise() - inner));
    gates_[t].backward(params, cache.gates[t], dz, grad, nullptr);
  }

  for (std::size_t i = 0; i < shared_.size(); ++i)
    shared_[i].backward(params, cache.shared[i], d_shared[i], grad, nullptr);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < task_experts_[t].size(); ++j)
      task_experts_[t][j].backward(params, cache.task_experts[t][j], d_task[t][j], grad, nullptr);
}

void PleArchitecture::init_he(double* params, Rng& rng) const {
  for (const auto& s : shared_) s.init_he(params, rng);
  for (const auto& te : task_experts_)
    for (const auto& s : te) s.init_he(params, rng);
  for (const auto& s : gates_) s.init_he(params, rng);
  for (const auto& s : towers_) s.init_he(params, rng);
}

PleNetwork make_ple(PleConfig config, std::optional<std::uint64_t> seed) {
  PleNetwork net;
  net.arch = std::make_shared<const PleArchitecture>(std::move(config));
  net.params = ParamVector(net.arch->layout());
  if (seed) {
    Rng rng(*seed);
    net.arch->init_he(net.params.data(), rng);
  }
  return net;
}

PleOutput ple_forward(const PleNetwork& net, std::span<const double> x) {
  const auto& arch = *net.arch;
  if (x.size() != arch.config().input_dim)
    throw ShapeError("ple_forward: input has " + std::to_string(x.size()) + " entries, expected " +
                     std::to_string(arch.config().input_dim));
  if (net.params.size() != arch.param_count()) throw ShapeError("ple_forward: parameter count mismatch");
  Matrix in = Eigen::Map<const Matrix>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  PleArchitecture::Cache cache;
  Matrix logits = arch.forward_logits(net.params.data(), in, &cache);
  PleOutput out;
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    out.logits.push_back(logits(0, t));
    out.probs.push_back(sigmoid(logits(0, t)));
    const Matrix& g = cache.gate_weights[static_cast<std::size_t>(t)];
    out.gate_weights.emplace_back(g.data(), g.data() + g.size());
  }
  return out;
}

Matrix ple_predict(const PleArchitecture& arch, std::span<const double> params, const Matrix& x) {
  if (params.size() != arch.param_count()) throw ShapeError("ple_predict: parameter count mismatch");
  constexpr Eigen::Index kChunk = 1024;
  Matrix probs(x.rows(), static_cast<Eigen::Index>(arch.config().n_tasks));
  for (Eigen::Index start = 0; start < x.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, x.rows() - start);
    const Matrix logits = arch.forward_logits(params.data(), x.middleRows(start, len), nullptr);
    probs.middleRows(start, len) = logits.unaryExpr([](double v) { return sigmoid(v); });
  }
  return probs;
}

ParamVector ple_backward(const PleNetwork& net, const Matrix& x, const Matrix& dlogits) {
  if (x.rows() == 0) throw ArgumentError("ple_backward: empty batch");
  if (dlogits.rows() != x.rows()) throw ShapeError("ple_backward: batch size mismatch");
  PleArchitecture::Cache cache;
  net.arch->forward_logits(net.params.data(), x, &cache);
  ParamVector grad(net.params.layout_ptr());
  net.arch->backward(net.params.data(), cache, dlogits, grad.data());
  return grad;
}

double ple_batch_loss(const PleArchitecture& arch, std::span<const double> params, const Matrix& x,
                      const Matrix& labels, ParamVector* grad) {
  if (x.rows() == 0) throw ArgumentError("ple_batch_loss: empty batch");
  if (labels.rows() != x.rows() || static_cast<std::size_t>(labels.cols()) != arch.config().n_tasks)
    throw ShapeError("ple_batch_loss: labels must be rows x n_tasks");
  PleArchitecture::Cache cache;
  Matrix logits = arch.forward_logits(params.data(), x, grad != nullptr ? &cache : nullptr);
  const double inv_b = 1.0 / static_cast<double>(x.rows());
  double loss = 0.0;
  Matrix dlogits(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r)
    for (Eigen::Index t = 0; t < logits.cols(); ++t) {
      const double q = sigmoid(logits(r, t));
      loss += bce(q, labels(r, t));
      dlogits(r, t) = bce_logit_grad(q, labels(r, t)) * inv_b;
    }
  if (grad != nullptr) {
    std::fill(grad->values().begin(), grad->values().end(), 0.0);
    arch.backward(params.data(), cache, dlogits, grad->data());
  }
  return loss * inv_b;
}

}  // namespace daum
