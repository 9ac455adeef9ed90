/// @file functionals.hpp
/// @brief Energy, entropy, volume and curvature functionals of a flow state.
///
/// All functions are pure. Integrals are lumped vertex sums, so identities
/// such as the energy dissipation law hold exactly for the semi-discrete flow.
#pragma once

#include <Eigen/Dense>

#include "rym/bundle.hpp"

namespace rym {

/// F = int (1/2 |du|^2 + e^{-u} phi^T h_t phi) + R_Sigma int u + lambda int e^u,
/// all against dV_Sigma.
struct EnergyReport {
  double value = 0.0;
  double dissipation = 0.0;  ///< analytic dF/dt
  double dirichlet = 0.0;
  double curvature = 0.0;
  double topological = 0.0;
  double volume = 0.0;
};

EnergyReport liouville_energy(const FlowState& state);

/// dF/dt = -int e^u udot^2 - lambda int e^{-u} phi^T h_t phi
///         - 2 int |d(e^{-u} phi)|^2_{h_t}
double liouville_dissipation(const FlowState& state);

/// int e^u dV_Sigma
double volume(const FlowState& state);

/// -R_Sigma A_Sigma + int e^{-u} phi^T h_t phi dV_Sigma - lambda Vol
double volume_rate(const FlowState& state);

/// Per-vertex scalar curvature e^{-u}(R_Sigma - lap u).
ScalarField scalar_curvature(const FlowState& state);

/// int (R_g - Rbar)^2 dV_g with Rbar = 4 pi chi / Vol.
double calabi_energy(const FlowState& state);

/// (2 pi)^k sqrt(det h)
double total_fiber_volume(const Eigen::MatrixXd& h);

/// pi sqrt(k lambda_max(h))
double fiber_diameter(const Eigen::MatrixXd& h);

struct TotalSpaceInvariants {
  double total_volume = 0.0;
  double fiber_diameter = 0.0;
  double base_diameter = 0.0;
};

TotalSpaceInvariants total_space_invariants(const FlowState& state, int sources = 32);

/// Density w > 0 paired with the entropy at scale tau. Requires lambda = 0.
struct EntropyInput {
  FlowState state;
  ScalarField w;
  double tau = 1.0;
};

/// f_- = -log w - log(4 pi tau)
ScalarField entropy_potential(const ScalarField& w, double tau);

/// w = e^{-f_-} / (4 pi tau)
ScalarField density_from_potential(const ScalarField& f_minus, double tau);

/// int w dV_g
double density_mass(const FlowState& state, const ScalarField& w);

/// W_- with n = 2. Throws DomainError if lambda != 0, w <= 0 somewhere, or
/// int w dV_g differs from 1 by more than 1e-8.
double entropy_W(const EntropyInput& inp);

/// Same functional without the unit-mass check.
double entropy_W_unnormalized(const EntropyInput& inp);

/// W_- minus int |grad f|^2_{g_t,h0} w dV_g.
double modified_entropy(const EntropyInput& inp);

/// First variation of W_- along a conformal change du (g -> e^{du} g), a
/// potential change df (phi -> phi + lap df), a fiber-metric change v_h, a
/// change dfm of f_- (w recomputed) and a change sigma of tau.
double entropy_variation(const EntropyInput& inp, const ScalarField& du, const TkField& df,
                         const Eigen::MatrixXd& v_h, const ScalarField& dfm, double sigma);

}  // namespace rym
