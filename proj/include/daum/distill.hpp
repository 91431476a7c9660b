#pragma once

#include "daum/core/dense.hpp"
#include "daum/core/params.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace daum {

struct StudentConfig {
  std::size_t input_dim = 108;
  std::size_t n_tasks = 4;
  std::vector<std::size_t> trunk_dims{32, 32};
  /// Weight of the uncertainty regression term.
  double lambda = 1.0;
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Rescaled teacher variances: column t of `targets` is gamma[t] * u_t.
struct DistillTargets {
  Matrix targets;
  std::vector<double> gamma;
};

/// gamma_t = mean(y_t) / mean(u_t). Throws DomainError when a task's mean
/// teacher variance is not positive.
DistillTargets rescale_uncertainty_labels(const Matrix& teacher_variance, const Matrix& labels);

/// ReLU trunk with, per task, a logit head and a softplus uncertainty head.
class StudentArchitecture {
 public:
  explicit StudentArchitecture(StudentConfig config);

  const StudentConfig& config() const { return config_; }
  const LayoutPtr& layout() const { return layout_; }
  std::size_t param_count() const { return layout_->size(); }

  struct Cache {
    DenseCache trunk;
    DenseCache pred;
    DenseCache unc_raw;
  };
  struct Output {
    Matrix logits;
    Matrix uncertainty;
  };
  Output forward(const double* params, const Matrix& x, Cache* cache = nullptr) const;
  /// Accumulates the gradient given dLoss/dlogits and dLoss/duncertainty.
  void backward(const double* params, const Cache& cache, const Output& out, const Matrix& dlogits,
                const Matrix& duncertainty, double* grad) const;
  void init_he(double* params, Rng& rng) const;

 private:
  StudentConfig config_;
  LayoutPtr layout_;
  DenseStack trunk_;
  DenseStack pred_head_;
  DenseStack unc_head_;
};

struct StudentNet {
  std::shared_ptr<const StudentArchitecture> arch;
  ParamVector params;
  /// Counts forward evaluations performed by student_infer.
  std::shared_ptr<std::atomic<std::uint64_t>> forward_calls = std::make_shared<std::atomic<std::uint64_t>>(0);
};

StudentNet make_student(StudentConfig config, std::optional<std::uint64_t> seed = std::nullopt);

/// Batch mean of sum_t [BCE(p_t, y_t) + lambda (u_t - u'_t)^2] and, when
/// `grad` is given, its gradient.
double student_batch_loss(const StudentArchitecture& arch, std::span<const double> params, const Matrix& x,
                          const Matrix& labels, const Matrix& targets, double lambda, ParamVector* grad);

struct StudentEpoch {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
};

/// Mini-batch SGD of a freshly initialized student. `teacher_variance` must
/// have one row per training row; otherwise DataError.
StudentNet train_student(const Matrix& features, const Matrix& labels, const Matrix& teacher_variance,
                         const StudentConfig& config, std::vector<StudentEpoch>* log = nullptr,
                         DistillTargets* targets_out = nullptr);

struct StudentOutputs {
  Matrix probs;
  Matrix uncertainty;
};

/// One deterministic forward pass over the batch.
StudentOutputs student_infer(const StudentNet& student, const Matrix& x);
/// Single-instance form; returns (probabilities, uncertainties).
std::pair<std::vector<double>, std::vector<double>> student_infer(const StudentNet& student,
                                                                  std::span<const double> x);

}  // namespace daum
