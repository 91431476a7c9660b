#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace daum {

/// Ambiguous training point: one feature vector with conditional positive
/// rate q strictly inside (0, 1).
struct AmbiguousPoint {
  std::vector<double> feature;
  double q = 0.5;
};

struct Ar1Estimate {
  double empirical_var = 0.0;
  /// Closed form eta c q(1-q) / (2 - eta c q(1-q)).
  double predicted_var = 0.0;
  /// Var(eps) / (1 - alpha^2) evaluated from its two factors.
  double ar1_var = 0.0;
  double alpha = 0.0;
  double mean_error = 0.0;
  std::size_t burn_in = 0;
  std::size_t steps = 0;
};

/// eta c q(1-q) / (2 - eta c q(1-q)); DomainError unless 0 < eta c q(1-q) < 2.
double stationary_variance(double eta, double c, double q);

/// Stationary variance of e_{t+1} = alpha e_t + eps_t with
/// alpha = 1 - eta c q(1-q) and Var(eps) = (eta c)^2 q(1-q), computed as
/// Var(eps) / (1 - alpha^2) without further simplification.
double ar1_stationary_variance(double eta, double c, double q);

/// Per-sample SGD on a linear-logistic model f_w(x) = w.phi with labels drawn
/// Bernoulli(q) each step, starting from w = 0. The logit error
/// e_t = f_t - logit(q) is collected after `burn_in` steps.
Ar1Estimate simulate_ambiguous_sgd(double q, double eta, std::span<const double> phi, std::size_t steps,
                                   std::size_t burn_in, std::uint64_t seed);

/// First-order relative change of ||grad_w sigma(w.phi1)|| after one update
/// toward a neighbour (phi2, q2):
///   -eta s2 (1 - 2 q1)(q1 - q2) (phi1.phi2) / ||phi1|| * s1 / ||g1||,
/// s_i = q_i (1 - q_i), g1 = s1 phi1.
double neighbor_influence_predicted(std::span<const double> phi1, std::span<const double> phi2, double q1,
                                    double q2, double eta);

/// Applies dw = -eta (q2_pred - q2) s2 phi2 to w0 (s2 = q2 (1 - q2)) and
/// returns the measured relative change of ||grad_w sigma(w.phi1)||. Without
/// `w0` the minimum-norm solution of w.phi1 = logit(q1) is used.
double neighbor_influence_measured(std::span<const double> phi1, std::span<const double> phi2, double q1,
                                   double q2, double eta,
                                   std::optional<std::span<const double>> w0 = std::nullopt);

struct StationaryCell {
  double eta = 0.0;
  double c = 0.0;
  double q = 0.0;
  double predicted_var = 0.0;
  double empirical_var = 0.0;
  double relative_error = 0.0;
  double ar1_var = 0.0;
  double ar1_relative_error = 0.0;
  bool stationary = true;
};

struct StationarySweepConfig {
  std::vector<double> etas{0.05, 0.1, 0.2};
  std::vector<double> qs{0.2, 0.35, 0.5, 0.65, 0.8};
  std::vector<double> cs{0.5, 1.0, 2.0};
  std::size_t steps = 200000;
  /// Burn-in as a fraction of steps.
  double burn_in_fraction = 0.1;
  std::size_t feature_dim = 4;
  std::uint64_t seed = 7;
};

/// One simulation per grid cell; each cell has its own derived seed.
std::vector<StationaryCell> stationary_sweep(const StationarySweepConfig& config);

struct NeighborTrialConfig {
  std::size_t trials = 1000;
  double eta = 1e-3;
  std::size_t feature_dim = 8;
  /// Scale of the phi2 - phi1 perturbation relative to ||phi1||.
  double neighbor_offset = 0.02;
  /// Trials keep |phi1.phi2| / (||phi1|| ||phi2||) at least this large.
  double min_cosine = 0.1;
  /// Trials keep |q1 - q2| and |q1 - 0.5| at least this large.
  double min_q_gap = 0.1;
  double min_q1_margin = 0.05;
  bool unit_phi1 = true;
  std::uint64_t seed = 11;
};

struct NeighborTrialSummary {
  std::size_t trials = 0;
  double sign_agreement = 0.0;
  double max_ratio_error = 0.0;
  double median_ratio_error = 0.0;
};

NeighborTrialSummary neighbor_trials(const NeighborTrialConfig& config);

}  // namespace daum
