#pragma once

#include "daum/core/dense.hpp"
#include "daum/core/params.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace daum {

/// Funnel objectives in their fixed task order.
enum Task : std::size_t { kClick = 0, kOnline = 1, kCart = 2, kDeal = 3 };
inline constexpr std::array<std::string_view, 4> kTaskNames = {"c2s_click", "online",
                                                               "add_to_cart", "deal"};
std::string task_name(std::size_t t);
/// Accepts a task name or a decimal index.
std::size_t task_from_string(std::string_view s, std::size_t n_tasks);

struct PleConfig {
  std::size_t input_dim = 108;
  std::size_t n_tasks = 4;
  std::size_t n_shared_experts = 3;
  std::size_t experts_per_task = 1;
  std::vector<std::size_t> expert_dims{64};
  /// Hidden widths of each gate; the gate's output width is fixed by the
  /// number of experts it mixes.
  std::vector<std::size_t> gate_dims{};
  /// Tower widths; the last entry must be 1 (the task logit).
  std::vector<std::size_t> tower_dims{32, 1};

  void validate() const;
  std::size_t experts_per_gate() const { return n_shared_experts + experts_per_task; }
  std::size_t expert_width() const { return expert_dims.back(); }
};

enum class ParamRole { backbone, head };

/// Experts and gates are backbone; towers are heads.
ParamRole role_of(const LayoutEntry& entry);

/// Per-coordinate flag, true for backbone parameters.
std::vector<bool> backbone_mask(const ParamLayout& layout);

/// Single-level PLE: shared experts, per-task experts, per-task softmax gates
/// over (shared + own) experts, and per-task towers. Stateless with respect to
/// parameters, so one architecture serves any number of sampled weight vectors.
class PleArchitecture {
 public:
  explicit PleArchitecture(PleConfig config);

  const PleConfig& config() const { return config_; }
  const LayoutPtr& layout() const { return layout_; }
  std::size_t param_count() const { return layout_->size(); }

  struct Cache {
    std::vector<DenseCache> shared;
    std::vector<std::vector<DenseCache>> task_experts;
    std::vector<DenseCache> gates;
    std::vector<Matrix> gate_weights;
    std::vector<DenseCache> towers;
  };

  /// Task logits for each row of `x` (rows x n_tasks).
  Matrix forward_logits(const double* params, const Matrix& x, Cache* cache = nullptr) const;

  /// Softmax gate weights of `task` for each row of `x`.
  Matrix gate_weights(const double* params, const Matrix& x, std::size_t task) const;

  /// Accumulates dLoss/dparams given dLoss/dlogits (rows x n_tasks).
  void backward(const double* params, const Cache& cache, const Matrix& dlogits, double* grad) const;

  void init_he(double* params, Rng& rng) const;

 private:
  const Matrix& expert_output(const Cache& cache, std::size_t task, std::size_t k) const;

  PleConfig config_;
  LayoutPtr layout_;
  std::vector<DenseStack> shared_;
  std::vector<std::vector<DenseStack>> task_experts_;
  std::vector<DenseStack> gates_;
  std::vector<DenseStack> towers_;
};

using PleArchPtr = std::shared_ptr<const PleArchitecture>;

struct PleNetwork {
  PleArchPtr arch;
  ParamVector params;
};

/// Zero parameters unless `seed` is given (He initialization).
PleNetwork make_ple(PleConfig config, std::optional<std::uint64_t> seed = std::nullopt);

struct PleOutput {
  std::vector<double> probs;
  std::vector<double> logits;
  std::vector<std::vector<double>> gate_weights;
};

PleOutput ple_forward(const PleNetwork& net, std::span<const double> x);

/// Sigmoid probabilities for a batch under an arbitrary parameter vector.
Matrix ple_predict(const PleArchitecture& arch, std::span<const double> params, const Matrix& x);

/// Gradient of sum_{rows,t} dlogits(row,t) * logit(row,t).
ParamVector ple_backward(const PleNetwork& net, const Matrix& x, const Matrix& dlogits);

/// Mean over rows of the summed per-task BCE, and its gradient.
double ple_batch_loss(const PleArchitecture& arch, std::span<const double> params, const Matrix& x,
                      const Matrix& labels, ParamVector* grad);

}  // namespace daum
