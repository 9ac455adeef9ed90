#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rym {

/// One real value per mesh vertex.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool operator==(const ScalarField&) const = default;

 private:
  std::vector<double> values_;
};

/// k stacked scalar fields on a common mesh: the t^k-valued potential.
class TkField {
 public:
  TkField() = default;
  TkField(std::size_t k, std::size_t n, double value = 0.0)
      : components_(k, ScalarField(n, value)) {}
  explicit TkField(std::vector<ScalarField> components)
      : components_(std::move(components)) {}

  std::size_t rank() const { return components_.size(); }
  std::size_t num_vertices() const {
    return components_.empty() ? 0 : components_.front().size();
  }
  ScalarField& operator[](std::size_t i) { return components_[i]; }
  const ScalarField& operator[](std::size_t i) const { return components_[i]; }

  auto begin() { return components_.begin(); }
  auto end() { return components_.end(); }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }

  bool operator==(const TkField&) const = default;

 private:
  std::vector<ScalarField> components_;
};

}  // namespace rym
