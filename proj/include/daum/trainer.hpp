#pragma once

#include "daum/core/train_config.hpp"
#include "daum/ple.hpp"

#include <functional>
#include <vector>

namespace daum {

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&, const ParamVector&)>;

/// Mini-batch SGD on the summed per-task BCE (batch mean). Rows are reshuffled
/// every epoch from the config seed; `on_epoch_end` sees the parameters after
/// each epoch.
std::vector<EpochStats> train_ple(PleNetwork& net, const Matrix& features, const Matrix& labels,
                                  const TrainConfig& config, const EpochCallback& on_epoch_end = {});

/// Rows of `m` at `idx`, in order.
Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx);

}  // namespace daum
