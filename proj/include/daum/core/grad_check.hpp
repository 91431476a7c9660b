#pragma once

#include "daum/core/params.hpp"

#include <cstddef>
#include <functional>

namespace daum {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t n_checked = 0;
  bool passed = true;
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-6;
  /// Denominator floor: relative error is |a - n| / max(|a|, |n|, floor), so
  /// gradients near zero are compared on an absolute scale.
  double magnitude_floor = 1e-3;
};

/// Compares `analytic` against central differences of `loss` for every
/// parameter. An empty parameter vector passes vacuously.
GradCheckReport grad_check(const ParamVector& params,
                           const std::function<double(const ParamVector&)>& loss,
                           const ParamVector& analytic, const GradCheckOptions& options = {});

}  // namespace daum
