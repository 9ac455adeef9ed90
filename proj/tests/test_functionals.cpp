#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rym/diagnostics.hpp"
#include "rym/flow.hpp"
#include "rym/functionals.hpp"

using namespace rym;

namespace {

constexpr double kPi = std::numbers::pi;

BundleSpec spec(int c1, int lambda = 0) {
  BundleSpec b;
  b.c1 = {c1};
  b.lambda = lambda;
  return b;
}

std::shared_ptr<const MeshSurface> torus(int n) {
  return std::make_shared<const MeshSurface>(build_torus_mesh(n));
}
std::shared_ptr<const MeshSurface> sphere(int s) {
  return std::make_shared<const MeshSurface>(build_sphere_mesh(s));
}

FlowState constant_state(std::shared_ptr<const MeshSurface> m, const BundleSpec& b, double u,
                         double t = 0.0) {
  const std::size_t n = m->num_vertices();
  return make_state(std::move(m), b, ScalarField(n, u), TkField(b.k, n), t);
}

// Low-mode random field; smooth enough that finite differences are meaningful.
ScalarField smooth_random(const MeshSurface& m, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  ScalarField out(m.num_vertices());
  const double a = d(rng), b = d(rng), c = d(rng), e = d(rng), g = d(rng);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& p = m.positions[i];
    if (m.kind == SurfaceKind::torus)
      out[i] = a * std::cos(p[0]) + b * std::sin(p[1]) + c * std::cos(p[0] + p[1]) +
               e * std::sin(2.0 * p[0]) + g;
    else
      out[i] = (a * p[0] + b * p[1] + c * p[2]) / std::sqrt(2.0) + e * p[0] * p[2] / 2.0 + g;
  }
  return out;
}

}  // namespace

TEST_SUITE("functionals") {
  TEST_CASE("Liouville energy closed forms") {
    // The curvature term is int e^{-u} phi^T h phi dV_Sigma, matching the flow's
    // own dissipation identity.
    CHECK(liouville_energy(constant_state(torus(64), spec(0, 1), 0.0)).value ==
          doctest::Approx(4.0 * kPi * kPi).epsilon(1e-12));
    CHECK(liouville_energy(constant_state(torus(64), spec(1, 1), 0.0)).value ==
          doctest::Approx(1.0 + 4.0 * kPi * kPi).epsilon(1e-12));
    CHECK(liouville_energy(constant_state(sphere(4), spec(1, 0), 0.0)).value ==
          doctest::Approx(kPi / 2.0).epsilon(1e-10));
  }

  TEST_CASE("energy report terms add up") {
    std::mt19937_64 rng(3);
    auto m = sphere(3);
    const FlowState s = make_state(m, spec(1, 1), smooth_random(*m, rng, 0.3),
                                   TkField({smooth_random(*m, rng, 0.3)}), 0.4);
    const EnergyReport r = liouville_energy(s);
    const double sum = r.dirichlet + r.curvature + r.topological + r.volume;
    CHECK(std::abs(r.value - sum) <= 1e-12 * std::abs(r.value));
    CHECK(r.dissipation == liouville_dissipation(s));
  }

  TEST_CASE("dissipation vanishes at rest and is -int e^u udot^2 without curvature") {
    CHECK(liouville_dissipation(constant_state(torus(16), spec(0), 0.0)) == 0.0);
    std::mt19937_64 rng(4);
    auto m = sphere(3);
    const FlowState s = make_state(m, spec(0), smooth_random(*m, rng, 0.3), TkField(1, m->num_vertices()));
    const Rates r = rhs(s);
    std::vector<double> a(s.u.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(s.u[i]) * r.du[i] * r.du[i];
    const double D = liouville_dissipation(s);
    CHECK(D <= 0.0);
    CHECK(std::abs(D + integrate(*m, a)) <= 1e-12 * std::abs(D));
  }

  TEST_CASE("dissipation matches centered differences along the flow") {
    std::mt19937_64 rng(5);
    for (int bg = 0; bg < 2; ++bg) {
      auto m = bg == 0 ? torus(32) : sphere(3);
      for (int trial = 0; trial < 5; ++trial) {
        const int c1 = trial % 2, lambda = (trial / 2) % 2;
        const FlowState s = make_state(m, spec(c1, lambda), smooth_random(*m, rng, 0.3),
                                       TkField({smooth_random(*m, rng, 0.3)}), 0.2 * trial);
        const double d = 1e-4;
        const double fd =
            (liouville_energy(step_rk(s, d)).value - liouville_energy(step_rk(s, -d)).value) /
            (2.0 * d);
        const double D = liouville_dissipation(s);
        CHECK(std::abs(fd - D) <= 1e-3 * (1.0 + std::abs(D)));
      }
    }
  }

  TEST_CASE("volume and volume_rate examples") {
    CHECK(volume_rate(constant_state(sphere(4), spec(1), 0.0)) ==
          doctest::Approx(-8.0 * kPi + kPi / 2.0).epsilon(1e-10));
    const FlowState fixed = constant_state(sphere(4), spec(1), std::log(1.0 / 16.0));
    CHECK(std::abs(volume_rate(fixed)) <= 1e-10);
    CHECK(volume(fixed) == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    CHECK(volume_rate(constant_state(torus(64), spec(0, 1), 0.0)) ==
          doctest::Approx(-4.0 * kPi * kPi).epsilon(1e-12));
  }

  TEST_CASE("volume_rate matches centered differences on a random state") {
    std::mt19937_64 rng(6);
    auto m = sphere(3);
    const FlowState s = make_state(m, spec(1, 1), smooth_random(*m, rng, 0.3),
                                   TkField({smooth_random(*m, rng, 0.3)}));
    const double d = 1e-4;
    const double fd = (volume(step_rk(s, d)) - volume(step_rk(s, -d))) / (2.0 * d);
    CHECK(std::abs(fd - volume_rate(s)) <= 1e-6 * std::abs(volume_rate(s)));
  }

  TEST_CASE("Calabi energy: zero for constant u, scales by e^{-c}") {
    CHECK(calabi_energy(constant_state(sphere(4), spec(0), 0.3)) <= 1e-4);
    CHECK(calabi_energy(constant_state(torus(16), spec(0), -1.0)) <= 1e-20);
    std::mt19937_64 rng(7);
    auto m = sphere(3);
    const ScalarField u = smooth_random(*m, rng, 0.4);
    const double c0 = calabi_energy(make_state(m, spec(0), u, TkField(1, m->num_vertices())));
    for (double c : {-1.0, 0.7}) {
      ScalarField v = u;
      for (auto& x : v) x += c;
      const double cc = calabi_energy(make_state(m, spec(0), v, TkField(1, m->num_vertices())));
      CHECK(cc / c0 == doctest::Approx(std::exp(-c)).epsilon(1e-10));
    }
  }

  TEST_CASE("total-space invariants") {
    const FlowState s = constant_state(torus(16), spec(0, 1), -0.5, 1.3);
    const TotalSpaceInvariants inv = total_space_invariants(s);
    CHECK(inv.total_volume ==
          doctest::Approx(volume(s) * 2.0 * kPi * std::exp(-1.3 / 2.0)).epsilon(1e-12));
    CHECK(inv.fiber_diameter == doctest::Approx(kPi * std::exp(-1.3 / 2.0)).epsilon(1e-12));
    CHECK(inv.base_diameter > 0.0);
    CHECK(fiber_diameter(fiber_metric_at(spec(0, 1), 30.0)) < 1e-6);
    Eigen::MatrixXd h(2, 2);
    h << 2.0, 0.0, 0.0, 0.5;
    CHECK(fiber_diameter(h) == doctest::Approx(kPi * 2.0).epsilon(1e-14));
    CHECK(total_fiber_volume(h) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
  }

  TEST_CASE("functionals are gauge invariant in f") {
    std::mt19937_64 rng(8);
    auto m = sphere(3);
    const ScalarField u = smooth_random(*m, rng, 0.3);
    ScalarField f = smooth_random(*m, rng, 0.3), g = f;
    for (auto& x : g) x += 5.0;
    const FlowState a = make_state(m, spec(1), u, TkField({f}));
    const FlowState b = make_state(m, spec(1), u, TkField({g}));
    CHECK(liouville_energy(a).value == doctest::Approx(liouville_energy(b).value).epsilon(1e-12));
    CHECK(volume_rate(a) == doctest::Approx(volume_rate(b)).epsilon(1e-12));
  }
}
