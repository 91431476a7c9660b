#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daum {

struct LayoutEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

/// Ordered (name, shape) descriptor of a flattened parameter vector.
class ParamLayout {
 public:
  /// Appends an entry and returns its offset.
  std::size_t add(std::string name, std::size_t rows, std::size_t cols);

  const std::vector<LayoutEntry>& entries() const { return entries_; }
  std::size_t size() const { return total_; }
  const LayoutEntry* find(std::string_view name) const;

  bool operator==(const ParamLayout& other) const;

 private:
  std::vector<LayoutEntry> entries_;
  std::size_t total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParamLayout>;

/// Flat 64-bit parameter storage tied to a layout. Copies are deep for the
/// values and share the (immutable) layout.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(LayoutPtr layout);
  ParamVector(LayoutPtr layout, std::vector<double> values);

  const ParamLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }

  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> segment(std::string_view name);
  std::span<const double> segment(std::string_view name) const;

  bool all_finite() const;
  bool same_layout(const ParamVector& other) const;

 private:
  LayoutPtr layout_;
  std::vector<double> values_;
};

/// Throws ShapeError unless both vectors share a layout.
void require_same_layout(const ParamVector& a, const ParamVector& b, const char* what);

/// Element-wise w - lr * g.
ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double learning_rate);

/// In-place variant used by training loops.
void sgd_step_inplace(ParamVector& params, const ParamVector& grad, double learning_rate);

}  // namespace daum
