#pragma once

#include "daum/core/dense.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace daum {

struct OutputMeta;

inline constexpr std::size_t kFunnelStages = 4;

/// One instance. Labels follow the funnel order click, online, cart, deal.
struct Example {
  std::int64_t id = 0;
  std::vector<double> features;
  std::array<int, kFunnelStages> labels{};
  /// Marginal ground-truth probability of each stage being positive.
  std::optional<std::array<double, kFunnelStages>> truth;
  /// Ambiguity group, -1 when the example is not part of one.
  std::int64_t group_id = -1;
};

struct FunnelConfig {
  std::size_t feature_dim = 108;
  std::size_t n_samples = 100000;
  std::array<double, kFunnelStages> target_rates{0.40, 0.25, 0.03, 0.01};
  double ambiguity_fraction = 0.05;
  std::size_t ambiguity_group_size = 5;
  /// Stage logit = score_scale * w_k.x + b_k with unit-norm w_k.
  double score_scale = 1.5;
  /// Cosine between each later stage direction and the click direction.
  double stage_correlation = 0.5;
  /// Features are rounded to this many decimals so text files round-trip.
  int feature_decimals = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Column-oriented dataset. Row i of every matrix belongs to ids[i].
struct Dataset {
  std::vector<std::int64_t> ids;
  Matrix features;
  Matrix labels;
  /// Empty (0 rows) when ground truth is unknown.
  Matrix truth;
  std::vector<std::int64_t> group_ids;

  std::size_t size() const { return ids.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  bool has_truth() const { return truth.rows() == features.rows() && truth.rows() > 0; }
  Example example(std::size_t i) const;
  Dataset subset(const std::vector<std::size_t>& rows) const;
  std::vector<double> label_column(std::size_t stage) const;
  /// Throws DataError when a row breaks funnel monotonicity.
  void check_funnel() const;
};

/// Builds a dataset from examples; all must share a feature dimension.
Dataset make_dataset(const std::vector<Example>& examples);

struct GeneratedFunnel {
  Dataset data;
  /// Calibrated stage offsets b_k.
  std::array<double, kFunnelStages> offsets{};
};

/// Standard-normal features, stage-conditional labels and recorded truth,
/// followed by inject_ambiguity when the configured fraction is positive.
GeneratedFunnel generate_funnel(const FunnelConfig& config);
Dataset generate(const FunnelConfig& config);

/// Copies one member's features and truth to every member of each group and
/// redraws all members' labels from that truth.
Dataset inject_ambiguity(const Dataset& data, const FunnelConfig& config);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded split keeping every ambiguity group on one side. Indices are
/// returned in ascending order.
SplitIndices split(const Dataset& data, double train_fraction, std::uint64_t seed);

void write_dataset_ndjson(const std::filesystem::path& path, const Dataset& data, const OutputMeta& meta);
Dataset read_dataset_ndjson(const std::filesystem::path& path);
/// id, features, labels and group_id; truth is omitted.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data, const OutputMeta& meta);

}  // namespace daum
