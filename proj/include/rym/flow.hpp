/// @file flow.hpp
/// @brief Time stepping of the reduced system for (u, f), the homogeneous ODE
/// and the backward conjugate heat equation.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rym/bundle.hpp"
#include "rym/record.hpp"

namespace rym {

enum class Scheme { rk4, imex };

struct StepControl {
  double cfl_factor = 0.5;
  double dt_max = 1e-2;
  double dt_min = 1e-12;
  double u_max = 20.0;
  Scheme scheme = Scheme::rk4;
  /// imex only: target for |u_new - u_extrapolated| / (|u_new - u_old| + error_floor),
  /// a relative local error indicator that steers the step size.
  double error_target = 0.005;
  double error_floor = 1e-9;
  /// imex only: if positive, also dt <= reaction_eta / (largest reaction rate).
  double reaction_eta = 0.0;
  /// imex only: largest ratio between consecutive steps.
  double growth = 1.1;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 2000;

  void validate() const;
};

std::string to_string(Scheme scheme);

struct Rates {
  ScalarField du;
  TkField df;
};

Rates rhs(const FlowState& state);

/// cfl * e^{min u} / laplacian_bound, not clamped.
double cfl_dt(const FlowState& state, double cfl_factor);

/// cfl_dt clamped to [dt_min, dt_max].
double stability_dt(const FlowState& state, const StepControl& ctl);

/// One classical Runge-Kutta step. Negative dt integrates backward.
FlowState step_rk(const FlowState& state, double dt);

/// Semi-implicit BDF2 stepper: diffusion and the stabilizing part of the
/// reaction are implicit, the rest is extrapolated. The mass e^u a is frozen
/// at the extrapolated u, which keeps each linear system symmetric positive
/// definite. Stateful because BDF2 needs the previous step.
class ImexStepper {
 public:
  explicit ImexStepper(const StepControl& ctl);

  FlowState step(const FlowState& state, double dt);

  /// Largest reaction rate max_i |d r / d u|, used to cap the step size.
  static double reaction_rate(const FlowState& state);

  int last_cg_iterations() const { return last_iterations_; }
  /// Error indicator of the last step; zero after a first-order step.
  double last_error_ratio() const { return last_ratio_; }
  void reset();

 private:
  StepControl ctl_;
  std::optional<FlowState> prev_;
  double prev_dt_ = 0.0;
  int last_iterations_ = 0;
  double last_ratio_ = 0.0;
};

enum class Termination { reached_t_end, singularity, numerical_failure };

std::string to_string(Termination t);

struct Trajectory {
  std::vector<FlowState> snapshots;  ///< every `stride` time units, first at t = 0
  std::vector<DiagnosticsRecord> records;  ///< one per step, first at t = 0
  Termination termination = Termination::reached_t_end;
  std::string message;
  std::optional<FlowState> last_valid;
  long steps = 0;
};

/// Steps until t_end or a singularity (dt below dt_min, |u| above u_max).
/// Step sizes are cut to land on every multiple of `stride`.
Trajectory run_flow(const FlowState& initial, const StepControl& ctl, double t_end,
                    double stride);

struct HomogeneousRun {
  std::vector<double> t;
  std::vector<double> u;
  bool singular = false;
  std::string message;
};

/// RK4 for u' = -R e^{-u} + e^{-lambda t} (zeta^T h0 zeta) e^{-2u} - lambda with
/// zeta = 2 pi c1 / area.
HomogeneousRun run_homogeneous(const BundleSpec& spec, double R_sigma, double area, double u0,
                               double t_end, double dt);

/// Records for a homogeneous run, with fields computed from the closed forms.
std::vector<DiagnosticsRecord> homogeneous_records(const HomogeneousRun& run,
                                                   const BundleSpec& spec, double R_sigma,
                                                   double area);

/// Backward integration of the conjugate heat equation in mass form
/// m_i = w_i a_i e^{u_i}, dm/dt = -L w, from snapshot T_index down to 0.
/// Returns w at every snapshot 0..T_index. Requires lambda = 0 and uniformly
/// spaced snapshots.
std::vector<ScalarField> conjugate_heat_backward(const Trajectory& traj, std::size_t T_index,
                                                 const ScalarField& w_T);

}  // namespace rym
