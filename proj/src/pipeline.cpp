#include "daum/pipeline.hpp"

#include "daum/core/errors.hpp"

namespace daum {

SplitData split_dataset(const Dataset& data, const RunConfig& config) {
  const auto idx = split(data, config.data.train_fraction, config.data.split_seed);
  return {data.subset(idx.train), data.subset(idx.test)};
}

TeacherRun train_teacher(const Dataset& train, const RunConfig& config) {
  TeacherRun run;
  run.net = make_ple(config.ple_config(), config.model.init_seed);
  run.snapshots = SnapshotBuffer(config.swag.k_small);
  const std::size_t first_snapshot = config.train.epochs - config.swag.k_small;
  run.log = train_ple(run.net, train.features, train.labels, config.train,
                      [&](const EpochStats& stats, const ParamVector& params) {
                        if (stats.epoch >= first_snapshot) run.snapshots.push(params);
                      });
  return run;
}

SwagPosterior fit_teacher_posterior(const SnapshotBuffer& snapshots, const RunConfig& config) {
  return fit_posterior(snapshots, config.swag.rank, config.swag.scope);
}

UncertaintyBatch infer_dataset(const PleArchitecture& arch, const SwagPosterior& posterior, const Dataset& data,
                               const RunConfig& config) {
  auto batch = predict_with_uncertainty(arch, posterior, data.features, config.inference.n_samples,
                                        config.inference.seed, config.inference.threads);
  batch.ids = data.ids;
  return batch;
}

}  // namespace daum
