#include "daum/theory.hpp"

#include "daum/core/dense.hpp"
#include "daum/core/errors.hpp"
#include "daum/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace daum {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double logit(double q) { return std::log(q) - std::log1p(-q); }

double checked_gain(double eta, double c, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("conditional probability must lie strictly in (0, 1)");
  const double g = eta * c * q * (1.0 - q);
  if (!(g > 0.0 && g < 2.0))
    throw DomainError("non-stationary regime: eta * c * q(1-q) must lie in (0, 2)");
  return g;
}

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("conditional probability must lie strictly in (0, 1)");
}

}  // namespace

double stationary_variance(double eta, double c, double q) {
  const double g = checked_gain(eta, c, q);
  return g / (2.0 - g);
}

double ar1_stationary_variance(double eta, double c, double q) {
  const double g = checked_gain(eta, c, q);
  const double alpha = 1.0 - g;
  const double noise_var = eta * c * eta * c * q * (1.0 - q);
  return noise_var / (1.0 - alpha * alpha);
}

Ar1Estimate simulate_ambiguous_sgd(double q, double eta, std::span<const double> phi, std::size_t steps,
                                   std::size_t burn_in, std::uint64_t seed) {
  const double c = dot(phi, phi);
  Ar1Estimate est;
  est.predicted_var = stationary_variance(eta, c, q);
  est.ar1_var = ar1_stationary_variance(eta, c, q);
  est.alpha = 1.0 - eta * c * q * (1.0 - q);
  est.steps = steps;
  est.burn_in = burn_in;
  if (burn_in + 2 > steps) throw ArgumentError("simulate_ambiguous_sgd: burn_in leaves fewer than 2 samples");

  const double target = logit(q);
  std::vector<double> w(phi.size(), 0.0);
  Rng rng(seed);
  // Welford accumulation of the post-burn-in logit error.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double y = rng.bernoulli(q) ? 1.0 : 0.0;
    const double residual = sigmoid(dot(w, phi)) - y;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * residual * phi[i];
    if (t >= burn_in) {
      const double e = dot(w, phi) - target;
      ++count;
      const double delta = e - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (e - mean);
    }
  }
  est.mean_error = mean;
  est.empirical_var = m2 / static_cast<double>(count);
  return est;
}

double neighbor_influence_predicted(std::span<const double> phi1, std::span<const double> phi2, double q1,
                                    double q2, double eta) {
  if (phi1.size() != phi2.size()) throw ShapeError("neighbor influence: feature dimensions differ");
  check_q(q1);
  check_q(q2);
  const double norm1 = std::sqrt(dot(phi1, phi1));
  if (!(norm1 > 0.0)) throw DomainError("neighbor influence: phi1 has zero norm");
  const double s1 = q1 * (1.0 - q1);
  const double s2 = q2 * (1.0 - q2);
  const double g1_norm = s1 * norm1;
  return -eta * s2 * (1.0 - 2.0 * q1) * (q1 - q2) * dot(phi1, phi2) / norm1 * s1 / g1_norm;
}

double neighbor_influence_measured(std::span<const double> phi1, std::span<const double> phi2, double q1,
                                   double q2, double eta, std::optional<std::span<const double>> w0) {
  if (phi1.size() != phi2.size()) throw ShapeError("neighbor influence: feature dimensions differ");
  check_q(q1);
  check_q(q2);
  const double sq1 = dot(phi1, phi1);
  if (!(sq1 > 0.0)) throw DomainError("neighbor influence: phi1 has zero norm");

  std::vector<double> w(phi1.size());
  if (w0) {
    if (w0->size() != phi1.size()) throw ShapeError("neighbor influence: w0 dimension mismatch");
    std::copy(w0->begin(), w0->end(), w.begin());
  } else {
    const double scale = logit(q1) / sq1;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale * phi1[i];
  }

  auto grad_norm_at_phi1 = [&](const std::vector<double>& weights) {
    const double p = sigmoid(dot(weights, phi1));
    return p * (1.0 - p) * std::sqrt(sq1);
  };
  const double before = grad_norm_at_phi1(w);
  const double q2_pred = sigmoid(dot(w, phi2));
  const double s2 = q2 * (1.0 - q2);
  const double step = -eta * (q2_pred - q2) * s2;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += step * phi2[i];
  return (grad_norm_at_phi1(w) - before) / before;
}

std::vector<StationaryCell> stationary_sweep(const StationarySweepConfig& config) {
  std::vector<StationaryCell> cells;
  const auto burn_in = static_cast<std::size_t>(config.burn_in_fraction * static_cast<double>(config.steps));
  std::uint64_t index = 0;
  for (double eta : config.etas)
    for (double q : config.qs)
      for (double c : config.cs) {
        StationaryCell cell{eta, c, q};
        const double gain = eta * c * q * (1.0 - q);
        cell.stationary = gain > 0.0 && gain < 2.0;
        if (cell.stationary) {
          std::vector<double> phi(config.feature_dim,
                                  std::sqrt(c / static_cast<double>(config.feature_dim)));
          const auto est = simulate_ambiguous_sgd(q, eta, phi, config.steps, burn_in,
                                                  derive_seed(config.seed, index));
          cell.predicted_var = est.predicted_var;
          cell.empirical_var = est.empirical_var;
          cell.relative_error = std::abs(est.empirical_var - est.predicted_var) / est.predicted_var;
          cell.ar1_var = est.ar1_var;
          cell.ar1_relative_error = std::abs(est.empirical_var - est.ar1_var) / est.ar1_var;
        }
        cells.push_back(cell);
        ++index;
      }
  return cells;
}

NeighborTrialSummary neighbor_trials(const NeighborTrialConfig& config) {
  Rng rng(config.seed);
  const std::size_t dim = config.feature_dim;
  std::vector<double> phi1(dim), phi2(dim);
  std::vector<double> ratio_errors;
  std::size_t agree = 0;

  auto draw_q = [&] { return 0.05 + 0.9 * rng.uniform(); };
  while (ratio_errors.size() < config.trials) {
    rng.fill_normal(phi1);
    double n1 = std::sqrt(dot(phi1, phi1));
    const double target_norm = config.unit_phi1 ? 1.0 : 0.5 + 1.5 * rng.uniform();
    for (double& v : phi1) v *= target_norm / n1;
    n1 = target_norm;
    for (std::size_t i = 0; i < dim; ++i)
      phi2[i] = phi1[i] + config.neighbor_offset * n1 * rng.normal() / std::sqrt(static_cast<double>(dim));
    const double cosine = dot(phi1, phi2) / (n1 * std::sqrt(dot(phi2, phi2)));
    const double q1 = draw_q();
    const double q2 = draw_q();
    if (std::abs(cosine) < config.min_cosine || std::abs(q1 - q2) < config.min_q_gap ||
        std::abs(q1 - 0.5) < config.min_q1_margin)
      continue;

    const double predicted = neighbor_influence_predicted(phi1, phi2, q1, q2, config.eta);
    const double measured = neighbor_influence_measured(phi1, phi2, q1, q2, config.eta);
    const double law = (1.0 - 2.0 * q1) * (q2 - q1) * dot(phi1, phi2);
    if ((measured > 0.0) == (law > 0.0) && measured != 0.0) ++agree;
    ratio_errors.push_back(std::abs(measured / predicted - 1.0));
  }

  NeighborTrialSummary summary;
  summary.trials = ratio_errors.size();
  summary.sign_agreement = static_cast<double>(agree) / static_cast<double>(summary.trials);
  summary.max_ratio_error = *std::max_element(ratio_errors.begin(), ratio_errors.end());
  std::nth_element(ratio_errors.begin(), ratio_errors.begin() + static_cast<std::ptrdiff_t>(ratio_errors.size() / 2),
                   ratio_errors.end());
  summary.median_ratio_error = ratio_errors[ratio_errors.size() / 2];
  return summary;
}

}  // namespace daum
