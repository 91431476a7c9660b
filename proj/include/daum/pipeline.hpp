#pragma once

#include "daum/config.hpp"
#include "daum/synth.hpp"
#include "daum/trainer.hpp"
#include "daum/uncertainty.hpp"

#include <vector>

namespace daum {

struct SplitData {
  Dataset train;
  Dataset test;
};

SplitData split_dataset(const Dataset& data, const RunConfig& config);

/// Trained teacher plus the snapshots of its final k_small epochs.
struct TeacherRun {
  PleNetwork net;
  SnapshotBuffer snapshots{1};
  std::vector<EpochStats> log;
};

TeacherRun train_teacher(const Dataset& train, const RunConfig& config);

SwagPosterior fit_teacher_posterior(const SnapshotBuffer& snapshots, const RunConfig& config);

/// Sampled reports for every row of `data`, tagged with the dataset ids.
UncertaintyBatch infer_dataset(const PleArchitecture& arch, const SwagPosterior& posterior, const Dataset& data,
                               const RunConfig& config);

}  // namespace daum
