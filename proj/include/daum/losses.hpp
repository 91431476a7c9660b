#pragma once

#include <span>
#include <vector>

namespace daum {

/// Probability clamp used by every log-loss.
inline constexpr double kProbEpsilon = 1e-12;
/// Variance floor for the Gaussian mean-variance loss.
inline constexpr double kVarianceFloor = 1e-8;

struct LossValue {
  double total = 0.0;
  std::vector<double> per_task;
};

/// Binary cross-entropy of predicted probability `q` against label `y`.
double bce(double q, double y);

/// d bce / d logit evaluated at probability `q`.
inline double bce_logit_grad(double q, double y) { return q - y; }

/// (pred - target)^2, the distillation regression loss.
inline double squared_error(double pred, double target) { return (pred - target) * (pred - target); }

struct NllDiagnostics {
  bool variance_clamped = false;
};

/// 0.5 * log(var) + (y - mean)^2 / (2 var); `var` is floored at kVarianceFloor
/// and the clamp is reported through `diag` when given.
double gaussian_nll(double mean, double var, double y, NllDiagnostics* diag = nullptr);

/// Unweighted sum of per-task BCE.
LossValue multitask_loss(std::span<const double> preds, std::span<const double> labels);

}  // namespace daum
