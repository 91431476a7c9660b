#include "daum/trainer.hpp"

#include "daum/core/errors.hpp"

#include <algorithm>
#include <numeric>

namespace daum {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (epochs == 0) throw ConfigError("train: epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("train: batch_size must be at least 1");
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

std::vector<EpochStats> train_ple(PleNetwork& net, const Matrix& features, const Matrix& labels,
                                  const TrainConfig& config, const EpochCallback& on_epoch_end) {
  config.validate();
  if (features.rows() == 0) throw DataError("train_ple: empty training set");
  if (labels.rows() != features.rows()) throw ShapeError("train_ple: features and labels differ in rows");

  const auto n = static_cast<std::size_t>(features.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, 0x7261696eULL));
  ParamVector grad(net.params.layout_ptr());
  std::vector<EpochStats> history;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    std::vector<std::size_t> batch;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Matrix xb = gather_rows(features, batch);
      const Matrix yb = gather_rows(labels, batch);
      loss_sum += ple_batch_loss(*net.arch, net.params.values(), xb, yb, &grad);
      sgd_step_inplace(net.params, grad, config.learning_rate);
      ++batches;
    }
    if (!net.params.all_finite()) throw DomainError("train_ple: parameters diverged");
    EpochStats stats{epoch, loss_sum / static_cast<double>(batches)};
    history.push_back(stats);
    if (on_epoch_end) on_epoch_end(stats, net.params);
  }
  return history;
}

}  // namespace daum
