#include <algorithm>
#include <cmath>

#include "rym/errors.hpp"
#include "rym/flow.hpp"

namespace rym {

std::vector<ScalarField> conjugate_heat_backward(const Trajectory& traj, std::size_t T_index,
                                                 const ScalarField& w_T) {
  const auto& snaps = traj.snapshots;
  if (T_index >= snaps.size()) throw DomainError("T_index beyond stored snapshots");
  if (T_index == 0) return {w_T};
  const FlowState& last = snaps[T_index];
  if (last.spec.lambda != 0) throw DomainError("conjugate heat flow requires lambda = 0");
  const auto& mesh = *last.mesh;
  const std::size_t n = mesh.num_vertices();
  if (w_T.size() != n) throw DomainError("terminal density does not match the mesh");

  const double spacing = snaps[1].t - snaps[0].t;
  for (std::size_t j = 1; j <= T_index; ++j)
    if (std::abs(snaps[j].t - snaps[j - 1].t - spacing) > 1e-9 * spacing)
      throw DomainError("conjugate heat flow needs uniformly spaced snapshots");

  std::vector<double> m(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w_T[i] > 0.0)) throw DomainError("terminal density must be positive");
    m[i] = w_T[i] * mesh.vertex_areas[i] * std::exp(last.u[i]);
    total += m[i];
  }
  if (std::abs(total - 1.0) > 1e-8) throw DomainError("terminal density must have unit mass");

  std::vector<ScalarField> out(T_index + 1);
  out[T_index] = w_T;

  std::vector<double> eu(n), w(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t j = T_index; j > 0; --j) {
    const FlowState& hi = snaps[j];
    const FlowState& lo = snaps[j - 1];
    const double t_hi = hi.t, t_lo = lo.t;
    double umin = 0.0;
    {
      const double a = *std::min_element(hi.u.begin(), hi.u.end());
      const double b = *std::min_element(lo.u.begin(), lo.u.end());
      umin = std::min(a, b);
    }
    const int sub = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) * mesh.laplacian_bound /
                                                          (0.9 * std::exp(umin)))));
    const double h = (t_hi - t_lo) / sub;

    // dm/dt = -L (m / (a e^{u(t)}))
    auto rate = [&](double t, const std::vector<double>& mm, std::vector<double>& out_rate) {
      const double theta = (t - t_lo) / (t_hi - t_lo);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = (1.0 - theta) * lo.u[i] + theta * hi.u[i];
        w[i] = mm[i] / (mesh.vertex_areas[i] * std::exp(u));
      }
      kernels::stiffness(mesh.adjacency, w, out_rate);
      for (double& v : out_rate) v = -v;
    };

    for (int s = 0; s < sub; ++s) {
      const double t = t_hi - s * h;
      rate(t, m, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] - 0.5 * h * k1[i];
      rate(t - 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] - 0.5 * h * k2[i];
      rate(t - 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] - h * k3[i];
      rate(t - h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        m[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    ScalarField wj(n);
    for (std::size_t i = 0; i < n; ++i) {
      wj[i] = m[i] / (mesh.vertex_areas[i] * std::exp(lo.u[i]));
      if (!std::isfinite(wj[i]) || wj[i] < -1e-8)
        throw NumericalFailure("conjugate heat density lost positivity");
    }
    out[j - 1] = std::move(wj);
  }
  return out;
}

}  // namespace rym
