#include "daum/swag.hpp"

#include "daum/core/errors.hpp"
#include "daum/core/rng.hpp"
#include "daum/ple.hpp"

#include <cmath>

namespace daum {

std::string_view to_string(SwagScope s) { return s == SwagScope::all ? "all" : "backbone_only"; }

SwagScope swag_scope_from_string(std::string_view s) {
  if (s == "all") return SwagScope::all;
  if (s == "backbone_only") return SwagScope::backbone_only;
  throw ConfigError("unknown swag scope: " + std::string(s));
}

SnapshotBuffer::SnapshotBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ArgumentError("snapshot buffer capacity must be positive");
}

void SnapshotBuffer::push(const ParamVector& params) {
  if (!snapshots_.empty()) require_same_layout(snapshots_.front(), params, "collect_snapshot");
  snapshots_.push_back(params);
  if (snapshots_.size() > capacity_) snapshots_.pop_front();
}

void SwagPosterior::validate() const {
  if (rank == 0) throw StateError("swag posterior: rank must be positive");
  if (diag_var.size() != mean.size()) throw ShapeError("swag posterior: diagonal size mismatch");
  if (static_cast<std::size_t>(deviations.rows()) != mean.size() ||
      static_cast<std::size_t>(deviations.cols()) != rank)
    throw ShapeError("swag posterior: deviation matrix must be d x rank");
  for (double v : diag_var)
    if (!(v >= 0.0)) throw DomainError("swag posterior: negative or NaN diagonal variance");
}

SwagPosterior fit_posterior(const SnapshotBuffer& buffer, std::size_t rank, SwagScope scope) {
  if (!buffer.full())
    throw StateError("fit_posterior: buffer holds " + std::to_string(buffer.size()) + " of " +
                     std::to_string(buffer.capacity()) + " snapshots");
  if (rank < 1 || rank + 1 > buffer.capacity())
    throw ArgumentError("fit_posterior: rank must lie in [1, k_small - 1]");

  const auto& snaps = buffer.snapshots();
  const std::size_t k = snaps.size();
  const std::size_t d = snaps.front().size();

  SwagPosterior post;
  post.rank = rank;
  post.scope = scope;
  post.mean = ParamVector(snaps.front().layout_ptr());
  // Averaging offsets from the first snapshot keeps a constant coordinate exact.
  double* mean = post.mean.data();
  const ParamVector& ref = snaps.front();
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < d; ++i) mean[i] += s[i] - ref[i];
  for (std::size_t i = 0; i < d; ++i) mean[i] = ref[i] + mean[i] / static_cast<double>(k);

  post.diag_var.assign(d, 0.0);
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < d; ++i) {
      const double dev = s[i] - mean[i];
      post.diag_var[i] += dev * dev;
    }
  for (double& v : post.diag_var) v /= static_cast<double>(k);

  post.deviations.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rank));
  for (std::size_t c = 0; c < rank; ++c) {
    const ParamVector& s = snaps[k - rank + c];
    for (std::size_t i = 0; i < d; ++i)
      post.deviations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = s[i] - mean[i];
  }

  if (scope == SwagScope::backbone_only) {
    const auto mask = backbone_mask(post.mean.layout());
    for (std::size_t i = 0; i < d; ++i)
      if (!mask[i]) {
        post.diag_var[i] = 0.0;
        post.deviations.row(static_cast<Eigen::Index>(i)).setZero();
      }
  }
  return post;
}

void sample_weights_into(const SwagPosterior& posterior, std::uint64_t noise_seed, std::span<double> out) {
  const std::size_t d = posterior.dim();
  if (out.size() != d) throw ShapeError("sample_weights: output size mismatch");
  Rng rng(noise_seed);
  Eigen::VectorXd z_rank(static_cast<Eigen::Index>(posterior.rank));
  rng.fill_normal(std::span<double>(z_rank.data(), posterior.rank));

  const double diag_scale = 1.0 / std::sqrt(2.0);
  const double rank_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(posterior.scale_k() - 1));
  Eigen::Map<Eigen::VectorXd> w(out.data(), static_cast<Eigen::Index>(d));
  w.noalias() = posterior.deviations * z_rank;
  w *= rank_scale;
  const double* mean = posterior.mean.data();
  for (std::size_t i = 0; i < d; ++i)
    out[i] += mean[i] + diag_scale * std::sqrt(posterior.diag_var[i]) * rng.normal();
}

ParamVector sample_weights(const SwagPosterior& posterior, std::uint64_t noise_seed) {
  ParamVector out(posterior.mean.layout_ptr());
  sample_weights_into(posterior, noise_seed, out.values());
  return out;
}

}  // namespace daum
