#include "daum/core/grad_check.hpp"

#include "daum/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace daum {

GradCheckReport grad_check(const ParamVector& params,
                           const std::function<double(const ParamVector&)>& loss,
                           const ParamVector& analytic, const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ArgumentError("grad_check: step must be positive");
  require_same_layout(params, analytic, "grad_check");

  GradCheckReport report;
  ParamVector probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + options.step;
    const double up = loss(probe);
    probe[i] = original - options.step;
    const double down = loss(probe);
    probe[i] = original;

    const double numeric = (up - down) / (2.0 * options.step);
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), options.magnitude_floor});
    const double rel = std::abs(a - numeric) / denom;
    if (rel > report.max_rel_error || !std::isfinite(rel)) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
    ++report.n_checked;
  }
  report.passed = std::isfinite(report.max_rel_error) && report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace daum
