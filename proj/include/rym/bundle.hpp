/// @file bundle.hpp
/// @brief Bundle data (k, c1, h0, lambda), flow state and derived curvature.
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "rym/fields.hpp"
#include "rym/mesh.hpp"

namespace rym {

struct BundleSpec {
  int k = 1;
  std::vector<int> c1{0};
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Identity(1, 1);
  int lambda = 0;

  /// Throws DomainError unless k >= 1, c1 has k entries, h0 is symmetric
  /// positive definite and lambda is -1, 0 or 1.
  void validate() const;
  bool trivial() const;
};

struct FlowState {
  double t = 0.0;
  ScalarField u;
  TkField f;
  BundleSpec spec;
  std::shared_ptr<const MeshSurface> mesh;

  /// Throws NumericalFailure if u or f holds a NaN or Inf.
  void check_finite() const;
};

FlowState make_state(std::shared_ptr<const MeshSurface> mesh, const BundleSpec& spec,
                     ScalarField u, TkField f, double t = 0.0);

/// h_t = e^{-lambda t} h0
Eigen::MatrixXd fiber_metric_at(const BundleSpec& spec, double t);

/// zeta^I = 2 pi c1^I / area
Eigen::VectorXd zeta(const BundleSpec& spec, double area);
Eigen::VectorXd zeta(const BundleSpec& spec, const MeshSurface& mesh);

/// phi^I = zeta^I + lap f^I
TkField curvature_density(const FlowState& state);

/// Per-vertex phi^T h phi.
ScalarField fiber_quadratic(const TkField& phi, const Eigen::MatrixXd& h);

/// |F|^2_{g_t,h_t} = 2 e^{-2u} phi^T h_t phi
ScalarField F_norm_sq(const FlowState& state);

}  // namespace rym
