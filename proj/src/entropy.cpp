// Entropy W_- on a surface (n = 2) for the unnormalized flow.
//
// With dV_g = e^u dV_Sigma the functional becomes
//   W = tau sum a w lap f_- + tau sum a w (R_Sigma - lap u - e^{-u} P / 2)
//       + sum a e^u w (f_- - 2),
// where P = phi^T h phi and |grad f_-|^2 is taken pointwise as
// lap w / w + lap f_-, whose weighted sum of the first part vanishes.
#include <cmath>
#include <numbers>

#include "rym/errors.hpp"
#include "rym/functionals.hpp"

namespace rym {

namespace {

void require_lambda_zero(const FlowState& s) {
  if (s.spec.lambda != 0) throw DomainError("entropy functionals require lambda = 0");
}

void require_positive(const ScalarField& w) {
  for (double v : w)
    if (!(v > 0.0)) throw DomainError("entropy density must be positive");
}

}  // namespace

ScalarField entropy_potential(const ScalarField& w, double tau) {
  ScalarField f(w.size());
  const double shift = std::log(4.0 * std::numbers::pi * tau);
  for (std::size_t i = 0; i < w.size(); ++i) f[i] = -std::log(w[i]) - shift;
  return f;
}

ScalarField density_from_potential(const ScalarField& f_minus, double tau) {
  ScalarField w(f_minus.size());
  const double c = 1.0 / (4.0 * std::numbers::pi * tau);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = c * std::exp(-f_minus[i]);
  return w;
}

double density_mass(const FlowState& state, const ScalarField& w) {
  std::vector<double> m(w.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = w[i] * std::exp(state.u[i]);
  return integrate(*state.mesh, m);
}

double entropy_W_unnormalized(const EntropyInput& inp) {
  const FlowState& s = inp.state;
  require_lambda_zero(s);
  require_positive(inp.w);
  if (!(inp.tau > 0.0)) throw DomainError("tau must be positive");
  const auto& mesh = *s.mesh;
  const std::size_t n = mesh.num_vertices();
  const ScalarField fm = entropy_potential(inp.w, inp.tau);
  const ScalarField lap_fm = laplacian_apply(mesh, fm);
  const ScalarField lap_u = laplacian_apply(mesh, s.u);
  const ScalarField quad = fiber_quadratic(curvature_density(s), s.spec.h0);

  std::vector<double> geo(n), pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    geo[i] = inp.w[i] * (lap_fm[i] + mesh.R_sigma - lap_u[i] -
                         0.5 * std::exp(-s.u[i]) * quad[i]);
    pot[i] = std::exp(s.u[i]) * inp.w[i] * (fm[i] - 2.0);
  }
  return inp.tau * integrate(mesh, geo) + integrate(mesh, pot);
}

double entropy_W(const EntropyInput& inp) {
  require_lambda_zero(inp.state);
  require_positive(inp.w);
  if (std::abs(density_mass(inp.state, inp.w) - 1.0) > 1e-8)
    throw DomainError("entropy density must satisfy int w dV_g = 1");
  return entropy_W_unnormalized(inp);
}

double modified_entropy(const EntropyInput& inp) {
  const double W = entropy_W(inp);
  const FlowState& s = inp.state;
  // |grad f|^2_{g,h0} dV_g equals the background form against dV_Sigma.
  const ScalarField q = grad_quadratic_form(*s.mesh, s.f, s.spec.h0);
  std::vector<double> c(q.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = q[i] * inp.w[i];
  return W - integrate(*s.mesh, c);
}

double entropy_variation(const EntropyInput& inp, const ScalarField& du, const TkField& df,
                         const Eigen::MatrixXd& v_h, const ScalarField& dfm, double sigma) {
  const FlowState& s = inp.state;
  require_lambda_zero(s);
  require_positive(inp.w);
  const auto& mesh = *s.mesh;
  const std::size_t n = mesh.num_vertices();
  const std::size_t k = s.f.rank();
  const double tau = inp.tau;
  const ScalarField& w = inp.w;

  const ScalarField fm = entropy_potential(w, tau);
  const ScalarField lap_fm = laplacian_apply(mesh, fm);
  const ScalarField lap_w = laplacian_apply(mesh, w);
  const ScalarField lap_u = laplacian_apply(mesh, s.u);
  const TkField phi = curvature_density(s);
  const ScalarField quad = fiber_quadratic(phi, s.spec.h0);

  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double em = std::exp(-s.u[i]);
    const double grad_fm = em * (lap_w[i] / w[i] + lap_fm[i]);
    const double lap_g_fm = em * lap_fm[i];
    const double R = em * (mesh.R_sigma - lap_u[i]);
    const double F2 = 2.0 * em * em * quad[i];
    const double bracket = tau * (2.0 * lap_g_fm - grad_fm + R - 0.25 * F2) + fm[i] - 2.0;

    double v = sigma * (grad_fm + R - 0.25 * F2);
    v -= tau * du[i] * (R - 0.5 * F2 + lap_g_fm);
    v += dfm[i];
    v += bracket * (du[i] - dfm[i] - sigma / tau);

    // Fiber-metric change: -(tau / 4) <v_h, tr_g F (x) F>.
    double pv = 0.0;
    for (std::size_t I = 0; I < k; ++I)
      for (std::size_t J = 0; J < k; ++J) pv += v_h(I, J) * phi[I][i] * phi[J][i];
    v -= 0.5 * tau * em * em * pv;

    integrand[i] = v * w[i] * std::exp(s.u[i]);
  }
  double total = integrate(mesh, integrand);

  // Potential change: phi -> phi + lap df moves |F|^2 only.
  std::vector<double> conn(n, 0.0);
  for (std::size_t J = 0; J < k; ++J) {
    const ScalarField lap_df = laplacian_apply(mesh, df[J]);
    for (std::size_t I = 0; I < k; ++I)
      for (std::size_t i = 0; i < n; ++i)
        conn[i] += s.spec.h0(I, J) * phi[I][i] * lap_df[i];
  }
  for (std::size_t i = 0; i < n; ++i) conn[i] *= std::exp(-s.u[i]) * w[i];
  total -= tau * integrate(mesh, conn);
  return total;
}

}  // namespace rym
