#include "rym/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rym/errors.hpp"
#include "rym/functionals.hpp"

namespace rym {

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::chi_neg: return "chi_neg";
    case CaseId::chi_zero: return "chi_zero";
    case CaseId::chi_pos_trivial: return "chi_pos_trivial";
    case CaseId::chi_pos_nontrivial: return "chi_pos_nontrivial";
  }
  return "unknown";
}

CaseId case_from_string(const std::string& name) {
  if (name == "chi_neg") return CaseId::chi_neg;
  if (name == "chi_zero") return CaseId::chi_zero;
  if (name == "chi_pos_trivial") return CaseId::chi_pos_trivial;
  if (name == "chi_pos_nontrivial") return CaseId::chi_pos_nontrivial;
  throw ConfigError("unknown case id: " + name);
}

DiagnosticsRecord measure(const FlowState& state, bool with_diameter) {
  const auto& mesh = *state.mesh;
  const std::size_t n = mesh.num_vertices();
  const Eigen::MatrixXd h = fiber_metric_at(state.spec, state.t);
  const TkField phi = curvature_density(state);
  const ScalarField quad = fiber_quadratic(phi, h);
  const ScalarField grad_f = grad_quadratic_form(mesh, state.f, state.spec.h0);
  const ScalarField f_sq = fiber_quadratic(state.f, state.spec.h0);

  DiagnosticsRecord r;
  r.t = state.t;
  r.sup_u = -std::numeric_limits<double>::infinity();
  r.inf_u = std::numeric_limits<double>::infinity();
  std::vector<double> curv(n), eu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = state.u[i];
    r.sup_u = std::max(r.sup_u, u);
    r.inf_u = std::min(r.inf_u, u);
    r.sup_grad_f_sq = std::max(r.sup_grad_f_sq, std::exp(-u) * grad_f[i]);
    r.sup_abs_f = std::max(r.sup_abs_f, std::sqrt(std::max(0.0, f_sq[i])));
    curv[i] = std::exp(-u) * quad[i];
    eu[i] = std::exp(u);
  }
  r.sup_exp_neg_u = std::exp(-r.inf_u);
  r.sup_exp_neg_u_minus_1 = r.sup_exp_neg_u - 1.0;
  const double curv_int = integrate(mesh, curv);
  r.F_energy = 2.0 * curv_int;
  r.volume = integrate(mesh, eu);
  const double lam = state.spec.lambda;
  r.volume_rate = -mesh.R_sigma * mesh.area + curv_int - lam * r.volume;
  r.volume_rate_scale = std::abs(mesh.R_sigma) * mesh.area + curv_int + std::abs(lam) * r.volume;
  r.calabi = calabi_energy(state);
  r.F_liouville = 0.5 * dirichlet_energy(mesh, state.u) + curv_int +
                  mesh.R_sigma * integrate(mesh, state.u) + lam * r.volume;
  if (with_diameter) r.diameter = geodesic_diameter(mesh, state.u);
  r.fiber_diameter = fiber_diameter(h);
  r.total_volume = r.volume * total_fiber_volume(h);
  if (mesh.kind == SurfaceKind::sphere) r.center_of_mass = center_of_mass(state);
  for (std::size_t I = 0; I < phi.rank(); ++I) r.chern.push_back(integrate(mesh, phi[I]));
  return r;
}

TrajectoryInfo describe(const Trajectory& traj) {
  const FlowState& s = traj.snapshots.front();
  TrajectoryInfo info;
  info.homogeneous = false;
  info.chi = s.mesh->chi;
  info.trivial_bundle = s.spec.trivial();
  info.lambda = s.spec.lambda;
  info.c1 = s.spec.c1;
  info.h0 = s.spec.h0;
  if (traj.termination == Termination::singularity) info.singular_time = traj.records.back().t;
  return info;
}

TrajectoryInfo describe(const HomogeneousRun& run, const BundleSpec& spec, double R_sigma,
                        double area) {
  TrajectoryInfo info;
  info.homogeneous = true;
  info.chi = static_cast<int>(std::lround(R_sigma * area / (4.0 * std::numbers::pi)));
  info.trivial_bundle = spec.trivial();
  info.lambda = spec.lambda;
  info.c1 = spec.c1;
  info.h0 = spec.h0;
  if (run.singular) info.singular_time = run.t.back();
  return info;
}

double volume_floor(const std::vector<int>& c1, const Eigen::MatrixXd& h) {
  Eigen::VectorXd c(static_cast<long>(c1.size()));
  for (std::size_t i = 0; i < c1.size(); ++i) c[static_cast<long>(i)] = c1[i];
  const double lambda_c = 2.0 * std::numbers::pi * std::sqrt(c.dot(h * c));
  return lambda_c * lambda_c / (8.0 * std::numbers::pi);
}

namespace {

// Records value <= bound + slack at each sample; keeps the tightest margin.
struct MarginTracker {
  Check check;
  explicit MarginTracker(std::string name) {
    check.name = std::move(name);
    check.margin = std::numeric_limits<double>::infinity();
  }
  void add(double t, double value, double allowed) {
    const double m = allowed - value;
    if (m < check.margin) {
      check.margin = m;
      check.worst_t = t;
    }
    if (!(m >= 0.0)) check.passed = false;
  }
};

double fitted_growth(const std::vector<DiagnosticsRecord>& records, double (*g)(const DiagnosticsRecord&)) {
  double c = 0.0;
  for (const auto& r : records) c = std::max(c, g(r));
  return c;
}

}  // namespace

CaseVerdict audit_estimates(const std::vector<DiagnosticsRecord>& records,
                            const TrajectoryInfo& info, CaseId case_id, Tolerance tol) {
  if (records.empty()) throw DomainError("no records to audit");
  auto mismatch = [&](const char* why) {
    throw ConfigError("case " + to_string(case_id) + " does not match trajectory: " + why);
  };
  switch (case_id) {
    case CaseId::chi_neg:
      if (info.chi >= 0) mismatch("needs chi < 0");
      break;
    case CaseId::chi_zero:
      if (info.chi != 0) mismatch("needs chi = 0");
      break;
    case CaseId::chi_pos_trivial:
      if (info.chi <= 0 || !info.trivial_bundle) mismatch("needs chi > 0 and c1 = 0");
      break;
    case CaseId::chi_pos_nontrivial:
      if (info.chi <= 0 || info.trivial_bundle) mismatch("needs chi > 0 and c1 != 0");
      break;
  }

  CaseVerdict v;
  v.case_id = case_id;
  v.tolerance = tol;
  const DiagnosticsRecord& r0 = records.front();

  switch (case_id) {
    case CaseId::chi_neg: {
      MarginTracker m("sup(e^-u - 1) <= e^-t sup(e^-u0 - 1)");
      for (const auto& r : records) {
        const double bound = std::exp(-r.t) * r0.sup_exp_neg_u_minus_1;
        m.add(r.t, r.sup_exp_neg_u_minus_1, bound + tol.slack(bound));
      }
      v.checks.push_back(m.check);
      break;
    }
    case CaseId::chi_zero: {
      MarginTracker m("sup e^-u <= e^t sup e^-u0");
      for (const auto& r : records) {
        const double bound = std::exp(r.t) * r0.sup_exp_neg_u;
        m.add(r.t, r.sup_exp_neg_u, bound + tol.slack(bound));
      }
      v.checks.push_back(m.check);
      break;
    }
    case CaseId::chi_pos_trivial: {
      const double stop = info.singular_time > 0.0 ? 0.9 * info.singular_time
                                                   : std::numeric_limits<double>::infinity();
      Check c = check_grad_f_nonincreasing(records, tol.abs, stop);
      v.checks.push_back(c);
      break;
    }
    case CaseId::chi_pos_nontrivial: {
      MarginTracker m("Vol >= lambda_c^2 / (8 pi)");
      const double lam = info.lambda;
      for (const auto& r : records) {
        const double floor = volume_floor(info.c1, std::exp(-lam * r.t) * info.h0);
        m.add(r.t, floor * (1.0 - tol.rel), r.volume);
      }
      v.checks.push_back(m.check);
      break;
    }
  }

  v.monitors.push_back({"C_sup_f_linear", fitted_growth(records, [](const DiagnosticsRecord& r) {
                          return r.sup_abs_f / (1.0 + r.t);
                        })});
  v.monitors.push_back({"C_grad_f_exp", fitted_growth(records, [](const DiagnosticsRecord& r) {
                          return std::exp(-r.t) * r.sup_grad_f_sq;
                        })});
  v.monitors.push_back({"C_exp_neg_u_exp", fitted_growth(records, [](const DiagnosticsRecord& r) {
                          return std::exp(-r.t) * r.sup_exp_neg_u;
                        })});

  for (const auto& c : v.checks) v.pass = v.pass && c.passed;
  return v;
}

Check check_liouville_monotone(const std::vector<DiagnosticsRecord>& records, double rel) {
  MarginTracker m("F nonincreasing");
  for (std::size_t s = 1; s < records.size(); ++s) {
    const double prev = records[s - 1].F_liouville;
    m.add(records[s].t, records[s].F_liouville - prev, rel * (1.0 + std::abs(prev)));
  }
  if (records.size() < 2) m.check.margin = 0.0;
  return m.check;
}

Check check_volume_identity(const std::vector<DiagnosticsRecord>& records, double rel) {
  MarginTracker m("volume_rate matches finite differences");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Relative to the largest rate on the trajectory: the pointwise ratio is
  // meaningless where the rate passes through zero or decays to equilibrium.
  double rate_norm = 0.0;
  for (const auto& r : records) rate_norm = std::max(rate_norm, std::abs(r.volume_rate));
  for (std::size_t s = 1; s + 1 < records.size(); ++s) {
    const auto& a = records[s - 1];
    const auto& b = records[s];
    const auto& c = records[s + 1];
    const double h1 = b.t - a.t;
    const double h2 = c.t - b.t;
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    const double fd = (-h2 / (h1 * (h1 + h2))) * a.volume + ((h2 - h1) / (h1 * h2)) * b.volume +
                      (h1 / (h2 * (h1 + h2))) * c.volume;
    const double floor = 64.0 * eps * (b.volume / std::min(h1, h2) + b.volume_rate_scale);
    m.add(b.t, std::abs(fd - b.volume_rate), rel * rate_norm + floor);
  }
  if (records.size() < 3) m.check.margin = 0.0;
  return m.check;
}

Check check_chern_constancy(const std::vector<DiagnosticsRecord>& records,
                            const std::vector<int>& c1, double rel) {
  MarginTracker m("Chern integrals constant");
  double norm = 0.0;
  for (int c : c1) norm += double(c) * c;
  norm = std::sqrt(norm);
  for (const auto& r : records) {
    double worst = 0.0;
    for (std::size_t I = 0; I < c1.size() && I < r.chern.size(); ++I)
      worst = std::max(worst, std::abs(r.chern[I] - 2.0 * std::numbers::pi * c1[I]));
    m.add(r.t, worst, rel * (1.0 + norm));
  }
  return m.check;
}

Check check_grad_f_nonincreasing(const std::vector<DiagnosticsRecord>& records, double tol,
                                 double t_stop) {
  MarginTracker m("sup |grad f|^2 nonincreasing");
  for (std::size_t s = 1; s < records.size() && records[s].t <= t_stop; ++s)
    m.add(records[s].t, records[s].sup_grad_f_sq - records[s - 1].sup_grad_f_sq, tol);
  if (m.check.margin == std::numeric_limits<double>::infinity()) m.check.margin = 0.0;
  return m.check;
}

ConvergenceReport convergence_probe(const FlowState& s, double eps_calabi, double eps_trace) {
  const auto& mesh = *s.mesh;
  const std::size_t n = mesh.num_vertices();
  ConvergenceReport rep;
  rep.eps_calabi = eps_calabi;
  rep.eps_trace = eps_trace;
  rep.calabi = calabi_energy(s);
  const double vol = volume(s);
  rep.lambda1 = vol / mesh.area;

  std::vector<double> eu(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) eu[i] = std::exp(s.u[i]);
  rep.mean_exp_u = vol / mesh.area;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = (eu[i] - rep.mean_exp_u) * (eu[i] - rep.mean_exp_u);
  rep.rel_var_exp_u = integrate(mesh, tmp) / mesh.area / (rep.mean_exp_u * rep.mean_exp_u);

  const TkField phi = curvature_density(s);
  double var_total = 0.0, mean_sq = 0.0;
  for (std::size_t I = 0; I < phi.rank(); ++I) {
    // Trace e^{-u} phi averaged against dV_g = e^u dV_Sigma.
    const double mean = integrate(mesh, phi[I]) / vol;
    rep.lambda2.push_back(mean);
    for (std::size_t i = 0; i < n; ++i) {
      const double tr = phi[I][i] / eu[i];
      tmp[i] = (tr - mean) * (tr - mean) * eu[i];
    }
    var_total += integrate(mesh, tmp) / vol;
    mean_sq += mean * mean;
  }
  rep.trace_variance = mean_sq > 0.0 ? var_total / mean_sq : var_total;
  rep.converged = rep.calabi <= eps_calabi && rep.trace_variance <= eps_trace;
  return rep;
}

ConvergenceReport convergence_probe(const HomogeneousRun& run, double area, double eps) {
  ConvergenceReport rep;
  const double y = std::exp(run.u.back());
  rep.mean_exp_u = y;
  rep.lambda1 = y;
  rep.eps_calabi = eps;
  rep.eps_trace = eps;
  rep.converged = !run.singular && std::abs(y - 1.0) <= eps;
  (void)area;
  return rep;
}

SingularityReport singularity_probe(const std::vector<DiagnosticsRecord>& records,
                                    bool singular) {
  if (!singular) throw DomainError("singularity_probe needs a run that ended singular");
  if (records.size() < 3) throw DomainError("too few records for a singularity fit");
  const double t_last = records.back().t;
  const double t_from = 0.8 * t_last;
  double sw = 0, st = 0, sv = 0, stt = 0, stv = 0;
  for (const auto& r : records) {
    if (r.t < t_from) continue;
    sw += 1.0;
    st += r.t;
    sv += r.volume;
    stt += r.t * r.t;
    stv += r.t * r.volume;
  }
  if (sw < 2.0) throw DomainError("too few records in the fitting window");
  const double slope = (sw * stv - st * sv) / (sw * stt - st * st);
  const double intercept = (sv - slope * st) / sw;
  SingularityReport rep;
  rep.area_slope = slope;
  rep.singular_time_estimate = -intercept / slope;
  rep.last_time = t_last;
  return rep;
}

SingularityReport singularity_probe(const Trajectory& traj) {
  return singularity_probe(traj.records, traj.termination == Termination::singularity);
}

std::array<double, 3> center_of_mass(const FlowState& state) {
  const auto& mesh = *state.mesh;
  if (mesh.kind != SurfaceKind::sphere) throw DomainError("center_of_mass needs a sphere mesh");
  const std::size_t n = mesh.num_vertices();
  std::array<double, 3> com{0.0, 0.0, 0.0};
  std::vector<double> eu(n), x(n);
  for (std::size_t i = 0; i < n; ++i) eu[i] = std::exp(state.u[i]);
  const double vol = integrate(mesh, eu);
  for (int d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = mesh.positions[i];
      const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      x[i] = p[d] / r * eu[i];
    }
    com[d] = integrate(mesh, x) / vol;
  }
  return com;
}

}  // namespace rym
