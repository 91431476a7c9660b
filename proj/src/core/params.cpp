#include "daum/core/params.hpp"

#include "daum/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace daum {

std::size_t ParamLayout::add(std::string name, std::size_t rows, std::size_t cols) {
  if (find(name) != nullptr) throw ShapeError("duplicate layout entry: " + name);
  const std::size_t offset = total_;
  entries_.push_back({std::move(name), rows, cols, offset});
  total_ += rows * cols;
  return offset;
}

const LayoutEntry* ParamLayout::find(std::string_view name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const LayoutEntry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

bool ParamLayout::operator==(const ParamLayout& other) const {
  if (total_ != other.total_ || entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

ParamVector::ParamVector(LayoutPtr layout)
    : layout_(std::move(layout)), values_(layout_ ? layout_->size() : 0, 0.0) {
  if (!layout_) layout_ = std::make_shared<ParamLayout>();
}

ParamVector::ParamVector(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (!layout_) layout_ = std::make_shared<ParamLayout>();
  if (values_.size() != layout_->size())
    throw ShapeError("parameter count " + std::to_string(values_.size()) +
                     " does not match layout size " + std::to_string(layout_->size()));
}

std::span<double> ParamVector::segment(std::string_view name) {
  const LayoutEntry* e = layout_->find(name);
  if (e == nullptr) throw ShapeError("no layout entry named " + std::string(name));
  return std::span<double>(values_).subspan(e->offset, e->size());
}

std::span<const double> ParamVector::segment(std::string_view name) const {
  const LayoutEntry* e = layout_->find(name);
  if (e == nullptr) throw ShapeError("no layout entry named " + std::string(name));
  return std::span<const double>(values_).subspan(e->offset, e->size());
}

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ParamVector::same_layout(const ParamVector& other) const {
  if (layout_ == other.layout_) return true;
  if (!layout_ || !other.layout_) return false;
  return *layout_ == *other.layout_;
}

void require_same_layout(const ParamVector& a, const ParamVector& b, const char* what) {
  if (!a.same_layout(b)) throw ShapeError(std::string(what) + ": parameter layouts differ");
}

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double learning_rate) {
  ParamVector out = params;
  sgd_step_inplace(out, grad, learning_rate);
  return out;
}

void sgd_step_inplace(ParamVector& params, const ParamVector& grad, double learning_rate) {
  require_same_layout(params, grad, "sgd_step");
  double* w = params.data();
  const double* g = grad.data();
  for (std::size_t i = 0; i < params.size(); ++i) w[i] -= learning_rate * g[i];
}

}  // namespace daum
