#pragma once

#include "daum/core/train_config.hpp"
#include "daum/distill.hpp"
#include "daum/interception.hpp"
#include "daum/ple.hpp"
#include "daum/swag.hpp"
#include "daum/synth.hpp"
#include "daum/theory.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace daum {

struct DataSettings {
  FunnelConfig funnel;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 2;
  bool write_csv = false;
};

struct ModelSettings {
  std::size_t n_shared_experts = 3;
  std::size_t experts_per_task = 1;
  std::vector<std::size_t> expert_dims{64};
  std::vector<std::size_t> gate_dims{};
  std::vector<std::size_t> tower_dims{32, 1};
  std::uint64_t init_seed = 1;
};

struct SwagSettings {
  std::size_t k_small = 12;
  std::size_t rank = 10;
  SwagScope scope = SwagScope::all;
};

struct InferenceSettings {
  std::size_t n_samples = kDefaultInferenceSamples;
  /// Fixed decision threshold; negative means derive it from pass_ratio.
  double tau = -1.0;
  double pass_ratio = 0.1;
  std::size_t decision_task = kClick;
  std::uint64_t seed = 3;
  std::size_t threads = 1;
};

struct InterceptSettings {
  /// "reward", "direct" or "indirect".
  std::string strategy = "reward";
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};
  double uncertainty_pass_fraction = 0.1;
  double rate = 0.5;
  std::size_t score_task = kDeal;
  std::size_t uncertainty_task = kClick;
};

struct DistillSettings {
  std::vector<std::size_t> trunk_dims{32, 32};
  double lambda = 1.0;
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  std::uint64_t seed = 4;
};

struct EvalSettings {
  std::vector<double> ratios{0.0, 0.05, 0.1, 0.15, 0.2};
  std::vector<double> sparse_ratios{0.0, 0.005, 0.01, 0.02};
  std::size_t balanced_task = kClick;
  std::size_t sparse_task = kDeal;
  std::vector<std::size_t> budgets{0, 5, 10, 20};
  std::size_t histogram_bins = 30;
  double overlap_ratio = 0.1;
};

struct BenchSettings {
  std::size_t batch_size = 512;
  std::size_t repetitions = 30;
  std::size_t warmups = 5;
  std::size_t n_samples = kDefaultInferenceSamples;
  std::vector<std::size_t> scaling_samples{1, 2, 4, 8, 16};
  std::uint64_t seed = 5;
};

struct TheorySettings {
  StationarySweepConfig sweep;
  NeighborTrialConfig neighbor;
};

/// Every subcommand's settings. All fields have defaults; unknown keys are
/// rejected when parsing.
struct RunConfig {
  DataSettings data;
  ModelSettings model;
  TrainConfig train;
  SwagSettings swag;
  InferenceSettings inference;
  InterceptSettings intercept;
  DistillSettings distill;
  EvalSettings eval;
  BenchSettings bench;
  TheorySettings theory;

  PleConfig ple_config() const;
  StudentConfig student_config() const;
  /// Cross-section checks; throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Overlays `j` on the defaults. Throws ConfigError naming every unknown or
/// ill-typed key.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Applies "section.key=value" assignments to `j`; values are parsed as JSON
/// and fall back to plain strings.
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& assignments);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace daum
