#include "daum/losses.hpp"

#include "daum/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace daum {

double bce(double q, double y) {
  const double p = std::clamp(q, kProbEpsilon, 1.0 - kProbEpsilon);
  return -y * std::log(p) - (1.0 - y) * std::log1p(-p);
}

double gaussian_nll(double mean, double var, double y, NllDiagnostics* diag) {
  double v = var;
  if (!(v >= kVarianceFloor)) {
    v = kVarianceFloor;
    if (diag != nullptr) diag->variance_clamped = true;
  }
  const double r = y - mean;
  return 0.5 * std::log(v) + r * r / (2.0 * v);
}

LossValue multitask_loss(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size())
    throw ShapeError("multitask_loss: " + std::to_string(preds.size()) + " predictions vs " +
                     std::to_string(labels.size()) + " labels");
  LossValue out;
  out.per_task.reserve(preds.size());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    out.per_task.push_back(bce(preds[t], labels[t]));
    out.total += out.per_task.back();
  }
  return out;
}

}  // namespace daum
