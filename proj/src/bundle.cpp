#include "rym/bundle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rym/errors.hpp"

namespace rym {

void BundleSpec::validate() const {
  if (k < 1) throw DomainError("bundle rank k must be >= 1");
  if (static_cast<int>(c1.size()) != k) throw DomainError("c1 must have k entries");
  if (h0.rows() != k || h0.cols() != k) throw DomainError("h0 must be k x k");
  if (!h0.allFinite()) throw DomainError("h0 has non-finite entries");
  if ((h0 - h0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + h0.cwiseAbs().maxCoeff()))
    throw DomainError("h0 is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h0);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "h0 is not positive definite; eigenvalues:";
    for (int i = 0; i < k; ++i) msg << ' ' << eig.eigenvalues()[i];
    throw DomainError(msg.str());
  }
  if (lambda < -1 || lambda > 1) throw DomainError("lambda must be -1, 0 or 1");
}

bool BundleSpec::trivial() const {
  for (int c : c1)
    if (c != 0) return false;
  return true;
}

void FlowState::check_finite() const {
  for (double v : u)
    if (!std::isfinite(v)) throw NumericalFailure("non-finite conformal factor");
  for (const auto& comp : f)
    for (double v : comp)
      if (!std::isfinite(v)) throw NumericalFailure("non-finite connection potential");
}

FlowState make_state(std::shared_ptr<const MeshSurface> mesh, const BundleSpec& spec,
                     ScalarField u, TkField f, double t) {
  spec.validate();
  const std::size_t n = mesh->num_vertices();
  if (u.size() != n) throw DomainError("u does not match the mesh");
  if (f.rank() != static_cast<std::size_t>(spec.k)) throw DomainError("f rank differs from k");
  if (f.num_vertices() != n) throw DomainError("f does not match the mesh");
  FlowState s;
  s.t = t;
  s.u = std::move(u);
  s.f = std::move(f);
  s.spec = spec;
  s.mesh = std::move(mesh);
  return s;
}

Eigen::MatrixXd fiber_metric_at(const BundleSpec& spec, double t) {
  return std::exp(-spec.lambda * t) * spec.h0;
}

Eigen::VectorXd zeta(const BundleSpec& spec, double area) {
  Eigen::VectorXd z(spec.k);
  for (int i = 0; i < spec.k; ++i) z[i] = 2.0 * std::numbers::pi * spec.c1[i] / area;
  return z;
}

Eigen::VectorXd zeta(const BundleSpec& spec, const MeshSurface& mesh) {
  return zeta(spec, mesh.area);
}

TkField curvature_density(const FlowState& state) {
  const auto z = zeta(state.spec, *state.mesh);
  TkField phi(state.f.rank(), state.f.num_vertices());
  for (std::size_t I = 0; I < state.f.rank(); ++I) {
    phi[I] = laplacian_apply(*state.mesh, state.f[I]);
    for (double& v : phi[I]) v += z[static_cast<long>(I)];
  }
  return phi;
}

ScalarField fiber_quadratic(const TkField& phi, const Eigen::MatrixXd& h) {
  const std::size_t k = phi.rank();
  const std::size_t n = phi.num_vertices();
  ScalarField q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t I = 0; I < k; ++I)
      for (std::size_t J = 0; J < k; ++J) acc += h(I, J) * phi[I][i] * phi[J][i];
    q[i] = acc;
  }
  return q;
}

ScalarField F_norm_sq(const FlowState& state) {
  auto q = fiber_quadratic(curvature_density(state), fiber_metric_at(state.spec, state.t));
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= 2.0 * std::exp(-2.0 * state.u[i]);
  return q;
}

}  // namespace rym
