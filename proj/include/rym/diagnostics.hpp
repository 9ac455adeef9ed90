/// @file diagnostics.hpp
/// @brief Estimate audits, convergence and singularity probes on trajectories.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "rym/flow.hpp"
#include "rym/record.hpp"

namespace rym {

enum class CaseId { chi_neg, chi_zero, chi_pos_trivial, chi_pos_nontrivial };

std::string to_string(CaseId id);
CaseId case_from_string(const std::string& name);

/// value <= bound + abs + rel * |bound|
struct Tolerance {
  double abs = 1e-3;
  double rel = 1e-2;

  double slack(double bound) const { return abs + rel * std::abs(bound); }
};

inline constexpr Tolerance kPdeTolerance{1e-3, 1e-2};
inline constexpr Tolerance kOdeTolerance{1e-6, 0.0};

struct Check {
  std::string name;
  bool passed = true;
  double margin = 0.0;  ///< smallest slack left; negative when violated
  double worst_t = 0.0;
};

struct Monitor {
  std::string name;
  double value = 0.0;
};

struct CaseVerdict {
  CaseId case_id = CaseId::chi_neg;
  Tolerance tolerance;
  std::vector<Check> checks;
  std::vector<Monitor> monitors;
  bool pass = true;
};

/// What produced a record sequence; used to reject mismatched audits.
struct TrajectoryInfo {
  bool homogeneous = false;
  int chi = 0;
  bool trivial_bundle = true;
  int lambda = 0;
  std::vector<int> c1;
  Eigen::MatrixXd h0;
  double singular_time = -1.0;  ///< negative when the run did not end singular
};

TrajectoryInfo describe(const Trajectory& traj);
TrajectoryInfo describe(const HomogeneousRun& run, const BundleSpec& spec, double R_sigma,
                        double area);

/// Explicit-constant inequalities for the given case. Throws ConfigError when
/// the case does not match the trajectory.
CaseVerdict audit_estimates(const std::vector<DiagnosticsRecord>& records,
                            const TrajectoryInfo& info, CaseId case_id, Tolerance tol);

/// lambda_c = 2 pi |c1|_{h_t}; the stationary volume floor is lambda_c^2 / (8 pi).
double volume_floor(const std::vector<int>& c1, const Eigen::MatrixXd& h);

/// F nonincreasing: each step may rise by at most rel * (1 + |F|).
Check check_liouville_monotone(const std::vector<DiagnosticsRecord>& records, double rel);

/// Three-point finite differences of the volume against volume_rate. The error
/// at each record may be at most rel * max_t |volume_rate| plus a roundoff floor.
Check check_volume_identity(const std::vector<DiagnosticsRecord>& records, double rel);

/// Chern integrals constant: |int phi^I - 2 pi c1^I| <= rel * (1 + |c1|).
Check check_chern_constancy(const std::vector<DiagnosticsRecord>& records,
                            const std::vector<int>& c1, double rel);

/// Per-step nonincrease of sup |grad f|^2_{g_t,h0} up to t_stop.
Check check_grad_f_nonincreasing(const std::vector<DiagnosticsRecord>& records, double tol,
                                 double t_stop);

struct ConvergenceReport {
  bool converged = false;
  double calabi = 0.0;
  double trace_variance = 0.0;  ///< relative variance of e^{-u} phi under dV_g
  double lambda1 = 0.0;         ///< Vol / A_Sigma
  std::vector<double> lambda2;  ///< mean of e^{-u} phi^I under dV_g
  double mean_exp_u = 0.0;
  double rel_var_exp_u = 0.0;
  double eps_calabi = 1e-3;
  double eps_trace = 1e-3;
};

ConvergenceReport convergence_probe(const FlowState& final_state, double eps_calabi = 1e-3,
                                    double eps_trace = 1e-3);
ConvergenceReport convergence_probe(const HomogeneousRun& run, double area,
                                    double eps = 1e-6);

struct SingularityReport {
  double singular_time_estimate = 0.0;
  double area_slope = 0.0;
  double last_time = 0.0;
};

/// Least-squares fit of Vol(t) over the last 20% of the run. Throws
/// DomainError when the run did not end in a singularity.
SingularityReport singularity_probe(const std::vector<DiagnosticsRecord>& records,
                                    bool singular);
SingularityReport singularity_probe(const Trajectory& traj);

/// (1/Vol) int xhat e^u dV_Sigma with xhat the unit-sphere position.
std::array<double, 3> center_of_mass(const FlowState& state);

}  // namespace rym
