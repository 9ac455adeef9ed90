#include "rym/functionals.hpp"

#include <cmath>
#include <numbers>

#include "rym/flow.hpp"

namespace rym {

namespace {

ScalarField fiber_quadratic_now(const FlowState& s) {
  return fiber_quadratic(curvature_density(s), fiber_metric_at(s.spec, s.t));
}

}  // namespace

EnergyReport liouville_energy(const FlowState& state) {
  const auto& mesh = *state.mesh;
  const std::size_t n = mesh.num_vertices();
  const ScalarField quad = fiber_quadratic_now(state);
  std::vector<double> curv(n), eu(n);
  for (std::size_t i = 0; i < n; ++i) {
    curv[i] = std::exp(-state.u[i]) * quad[i];
    eu[i] = std::exp(state.u[i]);
  }
  EnergyReport r;
  r.dirichlet = 0.5 * dirichlet_energy(mesh, state.u);
  r.curvature = integrate(mesh, curv);
  r.topological = mesh.R_sigma * integrate(mesh, state.u);
  r.volume = state.spec.lambda * integrate(mesh, eu);
  r.value = r.dirichlet + r.curvature + r.topological + r.volume;
  r.dissipation = liouville_dissipation(state);
  return r;
}

double liouville_dissipation(const FlowState& state) {
  const auto& mesh = *state.mesh;
  const std::size_t n = mesh.num_vertices();
  const Rates rates = rhs(state);
  const Eigen::MatrixXd h = fiber_metric_at(state.spec, state.t);
  const ScalarField quad = fiber_quadratic(curvature_density(state), h);

  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::exp(state.u[i]) * rates.du[i] * rates.du[i];
    b[i] = std::exp(-state.u[i]) * quad[i];
  }
  // df/dt = e^{-u} phi, so the gradient term is the h-weighted Dirichlet form of df/dt.
  const double grad = integrate(mesh, grad_quadratic_form(mesh, rates.df, h));
  return -integrate(mesh, a) - state.spec.lambda * integrate(mesh, b) - 2.0 * grad;
}

double volume(const FlowState& state) {
  std::vector<double> eu(state.u.size());
  for (std::size_t i = 0; i < eu.size(); ++i) eu[i] = std::exp(state.u[i]);
  return integrate(*state.mesh, eu);
}

double volume_rate(const FlowState& state) {
  const auto& mesh = *state.mesh;
  const ScalarField quad = fiber_quadratic_now(state);
  std::vector<double> b(quad.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::exp(-state.u[i]) * quad[i];
  return -mesh.R_sigma * mesh.area + integrate(mesh, b) - state.spec.lambda * volume(state);
}

ScalarField scalar_curvature(const FlowState& state) {
  ScalarField R = laplacian_apply(*state.mesh, state.u);
  for (std::size_t i = 0; i < R.size(); ++i)
    R[i] = std::exp(-state.u[i]) * (state.mesh->R_sigma - R[i]);
  return R;
}

double calabi_energy(const FlowState& state) {
  const auto& mesh = *state.mesh;
  const ScalarField R = scalar_curvature(state);
  const double vol = volume(state);
  const double rbar = 4.0 * std::numbers::pi * mesh.chi / vol;
  std::vector<double> c(R.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = (R[i] - rbar) * (R[i] - rbar) * std::exp(state.u[i]);
  return integrate(mesh, c);
}

double total_fiber_volume(const Eigen::MatrixXd& h) {
  return std::pow(2.0 * std::numbers::pi, static_cast<double>(h.rows())) *
         std::sqrt(h.determinant());
}

double fiber_diameter(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  return std::numbers::pi * std::sqrt(static_cast<double>(h.rows()) * eig.eigenvalues().maxCoeff());
}

TotalSpaceInvariants total_space_invariants(const FlowState& state, int sources) {
  const Eigen::MatrixXd h = fiber_metric_at(state.spec, state.t);
  TotalSpaceInvariants inv;
  inv.total_volume = volume(state) * total_fiber_volume(h);
  inv.fiber_diameter = fiber_diameter(h);
  inv.base_diameter = geodesic_diameter(*state.mesh, state.u, sources);
  return inv;
}

}  // namespace rym
