#pragma once

#include "daum/core/params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <deque>
#include <string_view>

namespace daum {

/// Which coordinates receive posterior noise. `backbone_only` keeps the task
/// heads pinned at the SWA mean.
enum class SwagScope { all, backbone_only };

std::string_view to_string(SwagScope s);
SwagScope swag_scope_from_string(std::string_view s);

/// Bounded FIFO of weight snapshots taken during the final training rounds.
class SnapshotBuffer {
 public:
  explicit SnapshotBuffer(std::size_t capacity);

  /// Stores a copy of `params`, evicting the oldest entry when full.
  void push(const ParamVector& params);

  std::size_t size() const { return snapshots_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return snapshots_.size() == capacity_; }
  const std::deque<ParamVector>& snapshots() const { return snapshots_; }

 private:
  std::size_t capacity_;
  std::deque<ParamVector> snapshots_;
};

/// Gaussian weight posterior: SWA mean, diagonal variance and r deviation
/// columns. Samples are
///   w = mean + sqrt(diag / 2) * z_d + D z_r / sqrt(2 (K - 1)),  K = rank + 1.
struct SwagPosterior {
  ParamVector mean;
  std::vector<double> diag_var;
  Eigen::MatrixXd deviations;  // d x rank, column-major
  std::size_t rank = 0;
  SwagScope scope = SwagScope::all;

  std::size_t dim() const { return mean.size(); }
  /// The K in the low-rank scale 1/sqrt(2(K-1)).
  std::size_t scale_k() const { return rank + 1; }
  void validate() const;
};

/// Fits mean, diagonal variance (population, over the whole buffer) and the
/// last `rank` deviation columns. Requires a full buffer and
/// 1 <= rank <= capacity - 1.
SwagPosterior fit_posterior(const SnapshotBuffer& buffer, std::size_t rank,
                            SwagScope scope = SwagScope::all);

/// Draws one weight vector. Noise order: rank low-rank normals, then d
/// diagonal normals, all from a generator seeded with `noise_seed`.
ParamVector sample_weights(const SwagPosterior& posterior, std::uint64_t noise_seed);

/// Allocation-free variant writing into `out` (size d).
void sample_weights_into(const SwagPosterior& posterior, std::uint64_t noise_seed, std::span<double> out);

}  // namespace daum
