#include "daum/distill.hpp"

#include "daum/core/errors.hpp"
#include "daum/losses.hpp"
#include "daum/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace daum {

void StudentConfig::validate() const {
  if (input_dim == 0) throw ConfigError("distill: input_dim must be positive");
  if (n_tasks == 0) throw ConfigError("distill: n_tasks must be positive");
  if (trunk_dims.empty()) throw ConfigError("distill: trunk_dims must not be empty");
  for (auto d : trunk_dims)
    if (d == 0) throw ConfigError("distill: trunk widths must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("distill: lambda must be non-negative");
  if (!(learning_rate > 0.0)) throw ConfigError("distill: learning_rate must be positive");
  if (epochs == 0) throw ConfigError("distill: epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("distill: batch_size must be at least 1");
}

DistillTargets rescale_uncertainty_labels(const Matrix& teacher_variance, const Matrix& labels) {
  if (teacher_variance.rows() != labels.rows() || teacher_variance.cols() != labels.cols())
    throw ShapeError("rescale_uncertainty_labels: variance and label shapes differ");
  if (labels.rows() == 0) throw DataError("rescale_uncertainty_labels: empty input");
  DistillTargets out;
  out.targets.resize(teacher_variance.rows(), teacher_variance.cols());
  for (Eigen::Index t = 0; t < labels.cols(); ++t) {
    const double mean_u = teacher_variance.col(t).mean();
    if (!(mean_u > 0.0))
      throw DomainError("degenerate teacher: mean variance of task " + std::to_string(t) + " is not positive");
    const double gamma = labels.col(t).mean() / mean_u;
    out.gamma.push_back(gamma);
    out.targets.col(t) = gamma * teacher_variance.col(t);
  }
  return out;
}

StudentArchitecture::StudentArchitecture(StudentConfig config) : config_(std::move(config)) {
  config_.validate();
  ParamLayout layout;
  std::vector<LayerSpec> trunk;
  std::size_t in = config_.input_dim;
  for (auto w : config_.trunk_dims) {
    trunk.push_back({in, w, Activation::relu});
    in = w;
  }
  trunk_ = DenseStack::register_in(layout, "trunk", trunk);
  pred_head_ = DenseStack::register_in(layout, "pred_head", {{in, config_.n_tasks, Activation::identity}});
  unc_head_ = DenseStack::register_in(layout, "unc_head", {{in, config_.n_tasks, Activation::identity}});
  layout_ = std::make_shared<const ParamLayout>(std::move(layout));
}

StudentArchitecture::Output StudentArchitecture::forward(const double* params, const Matrix& x,
                                                         Cache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != config_.input_dim)
    throw ShapeError("student: input has " + std::to_string(x.cols()) + " columns, expected " +
                     std::to_string(config_.input_dim));
  const Matrix h = trunk_.forward(params, x, cache ? &cache->trunk : nullptr);
  Output out;
  out.logits = pred_head_.forward(params, h, cache ? &cache->pred : nullptr);
  out.uncertainty = unc_head_.forward(params, h, cache ? &cache->unc_raw : nullptr);
  out.uncertainty = out.uncertainty.unaryExpr([](double v) { return softplus(v); });
  return out;
}

void StudentArchitecture::backward(const double* params, const Cache& cache, const Output& out,
                                   const Matrix& dlogits, const Matrix& duncertainty, double* grad) const {
  (void)out;
  const Matrix& raw = cache.unc_raw.outputs.back();
  const Matrix draw = duncertainty.cwiseProduct(raw.unaryExpr([](double v) { return sigmoid(v); }));
  Matrix dh_pred, dh_unc;
  pred_head_.backward(params, cache.pred, dlogits, grad, &dh_pred);
  unc_head_.backward(params, cache.unc_raw, draw, grad, &dh_unc);
  trunk_.backward(params, cache.trunk, dh_pred + dh_unc, grad, nullptr);
}

void StudentArchitecture::init_he(double* params, Rng& rng) const {
  trunk_.init_he(params, rng);
  pred_head_.init_he(params, rng);
  unc_head_.init_he(params, rng);
}

StudentNet make_student(StudentConfig config, std::optional<std::uint64_t> seed) {
  StudentNet net;
  net.arch = std::make_shared<const StudentArchitecture>(std::move(config));
  net.params = ParamVector(net.arch->layout());
  if (seed) {
    Rng rng(*seed);
    net.arch->init_he(net.params.data(), rng);
  }
  return net;
}

double student_batch_loss(const StudentArchitecture& arch, std::span<const double> params, const Matrix& x,
                          const Matrix& labels, const Matrix& targets, double lambda, ParamVector* grad) {
  if (params.size() != arch.param_count()) throw ShapeError("student_batch_loss: parameter count mismatch");
  const auto T = static_cast<Eigen::Index>(arch.config().n_tasks);
  if (labels.rows() != x.rows() || targets.rows() != x.rows() || labels.cols() != T || targets.cols() != T)
    throw ShapeError("student_batch_loss: label or target shape mismatch");
  if (x.rows() == 0) throw ArgumentError("student_batch_loss: empty batch");

  StudentArchitecture::Cache cache;
  const auto out = arch.forward(params.data(), x, grad ? &cache : nullptr);
  const double inv_b = 1.0 / static_cast<double>(x.rows());
  double loss = 0.0;
  Matrix dlogits(x.rows(), T), dunc(x.rows(), T);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index t = 0; t < T; ++t) {
      const double q = sigmoid(out.logits(i, t));
      const double diff = out.uncertainty(i, t) - targets(i, t);
      loss += bce(q, labels(i, t)) + lambda * diff * diff;
      dlogits(i, t) = bce_logit_grad(q, labels(i, t)) * inv_b;
      dunc(i, t) = 2.0 * lambda * diff * inv_b;
    }
  if (grad) {
    if (grad->size() != arch.param_count()) throw ShapeError("student_batch_loss: gradient size mismatch");
    std::fill(grad->values().begin(), grad->values().end(), 0.0);
    arch.backward(params.data(), cache, out, dlogits, dunc, grad->data());
  }
  return loss * inv_b;
}

StudentNet train_student(const Matrix& features, const Matrix& labels, const Matrix& teacher_variance,
                         const StudentConfig& config, std::vector<StudentEpoch>* log,
                         DistillTargets* targets_out) {
  config.validate();
  if (features.rows() == 0) throw DataError("train_student: empty training set");
  if (teacher_variance.rows() != features.rows())
    throw DataError("train_student: teacher reports cover " + std::to_string(teacher_variance.rows()) +
                    " of " + std::to_string(features.rows()) + " training rows");
  if (labels.rows() != features.rows()) throw ShapeError("train_student: labels and features differ in rows");

  DistillTargets targets = rescale_uncertainty_labels(teacher_variance, labels);
  StudentNet net = make_student(config, derive_seed(config.seed, 0x73747564ULL));
  const auto n = static_cast<std::size_t>(features.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, 0x7368756676ULL));
  ParamVector grad(net.params.layout_ptr());
  std::vector<std::size_t> batch;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(stop));
      loss_sum += student_batch_loss(*net.arch, net.params.values(), gather_rows(features, batch),
                                     gather_rows(labels, batch), gather_rows(targets.targets, batch),
                                     config.lambda, &grad);
      sgd_step_inplace(net.params, grad, config.learning_rate);
      ++batches;
    }
    if (!net.params.all_finite()) throw DomainError("train_student: parameters diverged");
    if (log) log->push_back({epoch, loss_sum / static_cast<double>(batches)});
  }
  if (targets_out) *targets_out = std::move(targets);
  return net;
}

StudentOutputs student_infer(const StudentNet& student, const Matrix& x) {
  const auto out = student.arch->forward(student.params.data(), x);
  student.forward_calls->fetch_add(1, std::memory_order_relaxed);
  return {out.logits.unaryExpr([](double v) { return sigmoid(v); }), out.uncertainty};
}

std::pair<std::vector<double>, std::vector<double>> student_infer(const StudentNet& student,
                                                                  std::span<const double> x) {
  Matrix row(1, static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), row.data());
  const auto out = student_infer(student, row);
  return {std::vector<double>(out.probs.data(), out.probs.data() + out.probs.cols()),
          std::vector<double>(out.uncertainty.data(), out.uncertainty.data() + out.uncertainty.cols())};
}

}  // namespace daum
