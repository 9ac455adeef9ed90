#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rym/errors.hpp"
#include "rym/flow.hpp"

namespace rym {

namespace {

// Exact inverse of (dbar - L) for the constant-coefficient torus stencil,
// applied through separable real Fourier transforms.
class TorusSpectral {
 public:
  explicit TorusSpectral(int n) : n_(n), q_(n, n), mu_(n) {
    const double pi = std::numbers::pi;
    for (int j = 0; j < n; ++j) q_(j, 0) = 1.0 / std::sqrt(double(n));
    mu_[0] = 0.0;
    int col = 1;
    for (int p = 1; p < n / 2; ++p) {
      for (int j = 0; j < n; ++j) {
        q_(j, col) = std::sqrt(2.0 / n) * std::cos(2.0 * pi * p * j / n);
        q_(j, col + 1) = std::sqrt(2.0 / n) * std::sin(2.0 * pi * p * j / n);
      }
      mu_[col] = mu_[col + 1] = 2.0 - 2.0 * std::cos(2.0 * pi * p / n);
      col += 2;
    }
    for (int j = 0; j < n; ++j) q_(j, col) = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(n));
    mu_[col] = 4.0;
  }

  void apply(double dbar, const std::vector<double>& r, std::vector<double>& z) const {
    Eigen::Map<const Eigen::MatrixXd> R(r.data(), n_, n_);
    Eigen::MatrixXd hat = q_.transpose() * R * q_;
    for (int b = 0; b < n_; ++b)
      for (int a = 0; a < n_; ++a) hat(a, b) /= dbar + mu_[a] + mu_[b];
    Eigen::Map<Eigen::MatrixXd> Z(z.data(), n_, n_);
    Z.noalias() = q_ * hat * q_.transpose();
  }

 private:
  int n_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd mu_;
};

// Preconditioned conjugate gradients for (diag(d) - L) x = b.
int solve_shifted(const MeshSurface& mesh, const std::vector<double>& d,
                  const std::vector<double>& b, std::vector<double>& x, double tol, int max_it,
                  const TorusSpectral* spectral) {
  const std::size_t n = b.size();
  const auto& adj = mesh.adjacency;
  std::vector<double> jacobi;
  double dbar = 0.0;
  if (spectral) {
    for (double v : d) dbar += v;
    dbar /= static_cast<double>(n);
  } else {
    jacobi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double wsum = 0.0;
      for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e) wsum += adj.weight[e];
      jacobi[i] = 1.0 / (d[i] + wsum);
    }
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (spectral) {
      spectral->apply(dbar, r, z);
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = jacobi[i] * r[i];
    }
  };

  std::vector<double> r(n), z(n), p(n), q(n);
  kernels::shifted_stiffness(adj, d, x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  const double bnorm = std::sqrt(kernels::dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }
  precondition(r, z);
  p = z;
  double rz = kernels::dot(r, z);
  // Adding a constant c changes the residual by -c d, so this removes the
  // residual's vertex sum and keeps the discrete mass balance exact.
  auto balance = [&]() {
    double rs = 0.0, ds = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rs += r[i];
      ds += d[i];
    }
    const double c = rs / ds;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += c;
      r[i] -= c * d[i];
    }
  };
  for (int it = 0; it < max_it; ++it) {
    if (std::sqrt(kernels::dot(r, r)) <= tol * bnorm) {
      balance();
      return it;
    }
    kernels::shifted_stiffness(adj, d, p, q);
    const double pq = kernels::dot(p, q);
    if (!(pq > 0.0)) throw NumericalFailure("conjugate gradients broke down");
    const double alpha = rz / pq;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    precondition(r, z);
    const double rz_next = kernels::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  const double rel = std::sqrt(kernels::dot(r, r)) / bnorm;
  // Roundoff can stall the residual slightly above a very tight tolerance.
  if (rel <= 1e3 * tol) {
    balance();
    return max_it;
  }
  throw NumericalFailure("conjugate gradients did not converge");
}

}  // namespace

ImexStepper::ImexStepper(const StepControl& ctl) : ctl_(ctl) {}

void ImexStepper::reset() {
  prev_.reset();
  prev_dt_ = 0.0;
}

double ImexStepper::reaction_rate(const FlowState& state) {
  const TkField phi = curvature_density(state);
  const ScalarField quad = fiber_quadratic(phi, fiber_metric_at(state.spec, state.t));
  const double R = state.mesh->R_sigma;
  double kappa = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double em = std::exp(-state.u[i]);
    kappa = std::max(kappa, std::abs(R) * em + 2.0 * em * em * quad[i]);
  }
  return kappa;
}

FlowState ImexStepper::step(const FlowState& state, double dt) {
  if (!(dt > 0.0)) throw DomainError("imex step needs dt > 0");
  state.check_finite();
  const auto& mesh = *state.mesh;
  const std::size_t n = mesh.num_vertices();
  const std::size_t k = state.f.rank();

  bool second = prev_.has_value() && prev_->mesh == state.mesh &&
                std::abs(prev_->t + prev_dt_ - state.t) <= 1e-12 * (1.0 + std::abs(state.t));
  const double omega = second ? dt / prev_dt_ : 0.0;
  if (omega > 2.2) second = false;

  // y^{n+1} coefficient and history combination, divided by dt later.
  const double a0 = second ? (1.0 + 2.0 * omega) / (1.0 + omega) : 1.0;
  const double c_now = second ? 1.0 + omega : 1.0;
  const double c_old = second ? omega * omega / (1.0 + omega) : 0.0;
  auto history = [&](const ScalarField& now, const ScalarField* old, std::size_t i) {
    return c_now * now[i] - (old ? c_old * (*old)[i] : 0.0);
  };

  std::vector<double> u_star(n), mass(n), d(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    u_star[i] = second ? (1.0 + omega) * state.u[i] - omega * prev_->u[i] : state.u[i];
    mass[i] = mesh.vertex_areas[i] * std::exp(u_star[i]);
  }

  const TorusSpectral* spectral = nullptr;
  static thread_local std::shared_ptr<const MeshSurface> cached_mesh;
  static thread_local std::unique_ptr<TorusSpectral> cached_spectral;
  if (mesh.kind == SurfaceKind::torus) {
    if (cached_mesh != state.mesh) {
      cached_spectral = std::make_unique<TorusSpectral>(mesh.resolution);
      cached_mesh = state.mesh;
    }
    spectral = cached_spectral.get();
  }

  FlowState out = state;
  out.t = state.t + dt;
  last_iterations_ = 0;

  const Eigen::VectorXd z = zeta(state.spec, mesh);
  for (std::size_t i = 0; i < n; ++i) d[i] = a0 / dt * mass[i];
  for (std::size_t I = 0; I < k; ++I) {
    const ScalarField* old = second ? &prev_->f[I] : nullptr;
    for (std::size_t i = 0; i < n; ++i)
      b[i] = mass[i] * history(state.f[I], old, i) / dt +
             mesh.vertex_areas[i] * z[static_cast<long>(I)];
    std::vector<double> x(state.f[I].values());
    last_iterations_ += solve_shifted(mesh, d, b, x, ctl_.cg_tolerance, ctl_.cg_max_iterations,
                                      spectral);
    out.f[I] = ScalarField(std::move(x));
  }

  const ScalarField quad =
      fiber_quadratic(curvature_density(out), fiber_metric_at(state.spec, out.t));
  const double R = mesh.R_sigma;
  const double lam = state.spec.lambda;
  const ScalarField* old_u = second ? &prev_->u : nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    const double em = std::exp(-u_star[i]);
    const double reaction = -R * em + em * em * quad[i] - lam;
    const double slope = R * em - 2.0 * em * em * quad[i];
    const double s = std::max(0.0, -slope);
    d[i] = (a0 / dt + s) * mass[i];
    b[i] = mass[i] * (history(state.u, old_u, i) / dt + reaction + s * u_star[i]);
  }
  std::vector<double> x(u_star);
  last_iterations_ += solve_shifted(mesh, d, b, x, ctl_.cg_tolerance, ctl_.cg_max_iterations,
                                    spectral);
  out.u = ScalarField(std::move(x));
  out.check_finite();

  last_ratio_ = 0.0;
  if (second) {
    double dev = 0.0, inc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dev = std::max(dev, std::abs(out.u[i] - u_star[i]));
      inc = std::max(inc, std::abs(out.u[i] - state.u[i]));
    }
    last_ratio_ = dev / (inc + ctl_.error_floor);
  }

  prev_ = state;
  prev_dt_ = dt;
  return out;
}

}  // namespace rym
