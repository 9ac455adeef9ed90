/// @file record.hpp
/// @brief One time sample of every monitored quantity.
#pragma once

#include <array>
#include <limits>
#include <vector>

namespace rym {

struct FlowState;

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_u = 0.0;
  double inf_u = 0.0;
  double sup_exp_neg_u = 0.0;
  double sup_exp_neg_u_minus_1 = 0.0;
  double sup_abs_f = 0.0;      ///< sup sqrt(f^T h0 f)
  double sup_grad_f_sq = 0.0;  ///< sup |grad f|^2_{g_t,h0}
  double F_energy = 0.0;       ///< integral of |F|^2_{g,h} dV_g
  double volume = 0.0;
  double volume_rate = 0.0;
  double volume_rate_scale = 0.0;  ///< |R A| + int e^{-u} P + |lambda| Vol
  double calabi = 0.0;
  double F_liouville = 0.0;
  double diameter = kAbsent;
  double fiber_diameter = 0.0;
  double total_volume = 0.0;
  std::array<double, 3> center_of_mass{kAbsent, kAbsent, kAbsent};
  std::vector<double> chern;  ///< integral of phi^I dV_Sigma per component
};

/// Evaluates all record fields; the diameter only when asked (it costs a few
/// dozen shortest-path sweeps).
DiagnosticsRecord measure(const FlowState& state, bool with_diameter);

}  // namespace rym
