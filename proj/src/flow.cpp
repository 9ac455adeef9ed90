#include "rym/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rym/errors.hpp"
#include "rym/functionals.hpp"

namespace rym {

void StepControl::validate() const {
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) throw DomainError("cfl_factor must lie in (0, 1]");
  if (!(dt_min > 0.0 && dt_min < dt_max)) throw DomainError("need 0 < dt_min < dt_max");
  if (!(u_max > 0.0)) throw DomainError("u_max must be positive");
  if (!(error_target > 0.0)) throw DomainError("error_target must be positive");
  if (!(error_floor > 0.0)) throw DomainError("error_floor must be positive");
  if (reaction_eta < 0.0) throw DomainError("reaction_eta must be nonnegative");
  if (!(growth >= 1.0 && growth <= 2.0)) throw DomainError("growth must lie in [1, 2]");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::rk4 ? "rk4" : "imex"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::singularity: return "singularity";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

Rates rhs(const FlowState& state) {
  state.check_finite();
  const auto& mesh = *state.mesh;
  const std::size_t n = mesh.num_vertices();
  const TkField phi = curvature_density(state);
  const ScalarField quad = fiber_quadratic(phi, fiber_metric_at(state.spec, state.t));
  const ScalarField lap_u = laplacian_apply(mesh, state.u);

  Rates r{ScalarField(n), TkField(state.f.rank(), n)};
  kernels::conformal_rate(state.u.span(), lap_u.span(), quad.span(), mesh.R_sigma,
                          state.spec.lambda, r.du.span());
  for (std::size_t I = 0; I < phi.rank(); ++I)
    kernels::potential_rate(state.u.span(), phi[I].span(), r.df[I].span());
  return r;
}

double cfl_dt(const FlowState& state, double cfl_factor) {
  const double umin = *std::min_element(state.u.begin(), state.u.end());
  return cfl_factor * std::exp(umin) / state.mesh->laplacian_bound;
}

double stability_dt(const FlowState& state, const StepControl& ctl) {
  return std::clamp(cfl_dt(state, ctl.cfl_factor), ctl.dt_min, ctl.dt_max);
}

namespace {

FlowState advanced(const FlowState& s, const Rates& r, double h) {
  FlowState out = s;
  out.t = s.t + h;
  kernels::axpy(h, r.du.span(), out.u.span());
  for (std::size_t I = 0; I < out.f.rank(); ++I) kernels::axpy(h, r.df[I].span(), out.f[I].span());
  return out;
}

}  // namespace

FlowState step_rk(const FlowState& state, double dt) {
  const Rates k1 = rhs(state);
  const Rates k2 = rhs(advanced(state, k1, 0.5 * dt));
  const Rates k3 = rhs(advanced(state, k2, 0.5 * dt));
  const Rates k4 = rhs(advanced(state, k3, dt));
  FlowState out = state;
  out.t = state.t + dt;
  const double c = dt / 6.0;
  const std::size_t n = state.u.size();
  for (std::size_t i = 0; i < n; ++i)
    out.u[i] += c * (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]);
  for (std::size_t I = 0; I < out.f.rank(); ++I)
    for (std::size_t i = 0; i < n; ++i)
      out.f[I][i] += c * (k1.df[I][i] + 2.0 * k2.df[I][i] + 2.0 * k3.df[I][i] + k4.df[I][i]);
  out.check_finite();
  return out;
}

Trajectory run_flow(const FlowState& initial, const StepControl& ctl, double t_end,
                    double stride) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(stride > 0.0)) throw DomainError("stride must be positive");
  ctl.validate();
  initial.check_finite();

  Trajectory traj;
  traj.snapshots.push_back(initial);
  traj.records.push_back(measure(initial, true));
  traj.last_valid = initial;

  FlowState state = initial;
  ImexStepper imex(ctl);
  long snapshot_index = 1;
  double nominal = ctl.scheme == Scheme::imex ? std::min(ctl.dt_max, 1e-3) : ctl.dt_max;
  const double snap_eps = 1e-9 * stride;

  while (state.t < t_end - snap_eps) {
    double dt;
    if (ctl.scheme == Scheme::rk4) {
      dt = cfl_dt(state, ctl.cfl_factor);
      if (dt < ctl.dt_min) {
        traj.termination = Termination::singularity;
        traj.message = "stable step below dt_min";
        break;
      }
      dt = std::min(dt, ctl.dt_max);
    } else {
      double factor = ctl.growth;
      const double ratio = imex.last_error_ratio();
      if (ratio > 0.0) factor = std::clamp(0.9 * std::sqrt(ctl.error_target / ratio), 0.5, ctl.growth);
      nominal = std::min(ctl.dt_max, factor * nominal);
      if (ctl.reaction_eta > 0.0) {
        const double kappa = ImexStepper::reaction_rate(state);
        if (kappa > 0.0) nominal = std::min(nominal, ctl.reaction_eta / kappa);
      }
      if (nominal < ctl.dt_min) {
        traj.termination = Termination::singularity;
        traj.message = "reaction-limited step below dt_min";
        break;
      }
      dt = nominal;
    }
    const double t_next = std::min(t_end, snapshot_index * stride);
    const double remaining = t_next - state.t;
    bool lands = false;
    if (dt >= remaining - snap_eps) {
      dt = remaining;
      lands = true;
    } else if (dt > 0.5 * remaining) {
      dt = 0.5 * remaining;
    }

    try {
      FlowState next = ctl.scheme == Scheme::rk4 ? step_rk(state, dt) : imex.step(state, dt);
      if (lands) next.t = t_next;
      state = std::move(next);
    } catch (const NumericalFailure& e) {
      traj.termination = Termination::numerical_failure;
      traj.message = e.what();
      break;
    }
    ++traj.steps;

    traj.records.push_back(measure(state, lands));
    if (lands) {
      traj.snapshots.push_back(state);
      if (std::abs(state.t - snapshot_index * stride) <= snap_eps) ++snapshot_index;
    }
    const auto [lo, hi] = std::minmax_element(state.u.begin(), state.u.end());
    if (std::max(-*lo, *hi) > ctl.u_max) {
      traj.termination = Termination::singularity;
      traj.message = "|u| exceeded u_max";
      break;
    }
    traj.last_valid = state;
  }
  return traj;
}

HomogeneousRun run_homogeneous(const BundleSpec& spec, double R_sigma, double area, double u0,
                               double t_end, double dt) {
  spec.validate();
  if (!(area > 0.0)) throw DomainError("area must be positive");
  if (!(dt > 0.0 && t_end > 0.0)) throw DomainError("dt and t_end must be positive");
  const Eigen::VectorXd z = zeta(spec, area);
  const double q0 = z.dot(spec.h0 * z);
  const double lam = spec.lambda;
  auto f = [&](double t, double u) {
    const double em = std::exp(-u);
    return -R_sigma * em + std::exp(-lam * t) * q0 * em * em - lam;
  };
  auto stiffness = [&](double t, double u) {
    const double em = std::exp(-u);
    return std::abs(R_sigma) * em + 2.0 * std::exp(-lam * t) * q0 * em * em;
  };

  HomogeneousRun run;
  run.t.push_back(0.0);
  run.u.push_back(u0);
  const long nsteps = std::lround(std::ceil(t_end / dt - 1e-9));
  double u = u0;
  for (long s = 0; s < nsteps; ++s) {
    const double t = s * dt;
    const double h = std::min(dt, t_end - t);
    if (h * stiffness(t, u) > 1.0) {
      run.singular = true;
      run.message = "step no longer resolves the solution";
      break;
    }
    const double k1 = f(t, u);
    const double k2 = f(t + 0.5 * h, u + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, u + 0.5 * h * k2);
    const double k4 = f(t + h, u + h * k3);
    const double next = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next) || std::abs(next) > 20.0) {
      run.singular = true;
      run.message = std::isfinite(next) ? "|u| exceeded 20" : "non-finite u";
      break;
    }
    u = next;
    run.t.push_back(s + 1 == nsteps ? t_end : t + h);
    run.u.push_back(u);
  }
  return run;
}

std::vector<DiagnosticsRecord> homogeneous_records(const HomogeneousRun& run,
                                                   const BundleSpec& spec, double R_sigma,
                                                   double area) {
  const Eigen::VectorXd z = zeta(spec, area);
  const double q0 = z.dot(spec.h0 * z);
  const double lam = spec.lambda;
  std::vector<DiagnosticsRecord> out;
  out.reserve(run.t.size());
  for (std::size_t s = 0; s < run.t.size(); ++s) {
    const double t = run.t[s];
    const double u = run.u[s];
    const double q = std::exp(-lam * t) * q0;
    const Eigen::MatrixXd h = fiber_metric_at(spec, t);
    DiagnosticsRecord r;
    r.t = t;
    r.sup_u = r.inf_u = u;
    r.sup_exp_neg_u = std::exp(-u);
    r.sup_exp_neg_u_minus_1 = std::exp(-u) - 1.0;
    r.F_energy = 2.0 * area * std::exp(-u) * q;
    r.volume = area * std::exp(u);
    r.volume_rate = -R_sigma * area + area * std::exp(-u) * q - lam * r.volume;
    r.volume_rate_scale =
        std::abs(R_sigma) * area + area * std::exp(-u) * q + std::abs(lam) * r.volume;
    r.calabi = 0.0;
    r.F_liouville = area * (std::exp(-u) * q + R_sigma * u + lam * std::exp(u));
    r.fiber_diameter = fiber_diameter(h);
    r.total_volume = r.volume * total_fiber_volume(h);
    for (int c : spec.c1) r.chern.push_back(2.0 * std::numbers::pi * c);
    out.push_back(r);
  }
  return out;
}

}  // namespace rym
