#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rym/diagnostics.hpp"
#include "rym/errors.hpp"
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

std::shared_ptr<const MeshSurface> sphere(int s) {
  return std::make_shared<const MeshSurface>(build_sphere_mesh(s));
}

// Records of a made-up trajectory with Vol(t) = v(t) and volume_rate = r(t).
template <class V, class R>
std::vector<DiagnosticsRecord> synthetic(V v, R r, int n, double t_end) {
  std::vector<DiagnosticsRecord> out(n + 1);
  for (int s = 0; s <= n; ++s) {
    const double t = t_end * s / n;
    out[s].t = t;
    out[s].volume = v(t);
    out[s].volume_rate = r(t);
    out[s].volume_rate_scale = std::abs(r(t));
    out[s].F_liouville = -t;
  }
  return out;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("homogeneous chi < 0 runs satisfy the explicit estimate") {
    for (double u0 : {-1.0, 0.5}) {
      const BundleSpec b = spec(2, 1);
      const HomogeneousRun run = run_homogeneous(b, -1.0, 4.0 * kPi, u0, 20.0, 1e-3);
      REQUIRE_FALSE(run.singular);
      const auto recs = homogeneous_records(run, b, -1.0, 4.0 * kPi);
      const CaseVerdict v =
          audit_estimates(recs, describe(run, b, -1.0, 4.0 * kPi), CaseId::chi_neg, {1e-9, 0.0});
      CHECK(v.pass);
      CHECK(std::abs(std::exp(run.u.back()) - 1.0) <= 1e-6);
      CHECK(convergence_probe(run, 4.0 * kPi).converged);
    }
  }

  TEST_CASE("audit refuses a case that does not match the trajectory") {
    const BundleSpec b = spec(0, 1);
    const HomogeneousRun run = run_homogeneous(b, -1.0, 4.0 * kPi, 0.0, 1.0, 1e-2);
    const auto recs = homogeneous_records(run, b, -1.0, 4.0 * kPi);
    const TrajectoryInfo info = describe(run, b, -1.0, 4.0 * kPi);
    CHECK_THROWS_AS(audit_estimates(recs, info, CaseId::chi_zero, kOdeTolerance), ConfigError);
    CHECK_THROWS_AS(audit_estimates(recs, info, CaseId::chi_pos_trivial, kOdeTolerance), ConfigError);
    CHECK_THROWS_AS(audit_estimates({}, info, CaseId::chi_neg, kOdeTolerance), DomainError);
    CHECK(case_from_string(to_string(CaseId::chi_pos_nontrivial)) == CaseId::chi_pos_nontrivial);
  }

  TEST_CASE("volume floor") {
    CHECK(volume_floor({1}, Eigen::MatrixXd::Identity(1, 1)) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK(volume_floor({0}, Eigen::MatrixXd::Identity(1, 1)) == 0.0);
    CHECK(volume_floor({2}, 0.5 * Eigen::MatrixXd::Identity(1, 1)) ==
          doctest::Approx(kPi).epsilon(1e-15));
  }

  TEST_CASE("homogeneous sphere collapse: T = A / (8 pi), slope -8 pi") {
    const BundleSpec b = spec(0);
    const HomogeneousRun run = run_homogeneous(b, 1.0, 8.0 * kPi, 0.0, 2.0, 1e-4);
    REQUIRE(run.singular);
    const SingularityReport rep =
        singularity_probe(homogeneous_records(run, b, 1.0, 8.0 * kPi), true);
    CHECK(rep.singular_time_estimate == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rep.area_slope == doctest::Approx(-8.0 * kPi).epsilon(1e-2));
  }

  TEST_CASE("singularity probe refuses runs that did not end singular") {
    const auto recs = synthetic([](double t) { return 1.0 + t; }, [](double) { return 1.0; }, 10, 1.0);
    CHECK_THROWS_AS(singularity_probe(recs, false), DomainError);
    CHECK_THROWS_AS(singularity_probe(std::vector<DiagnosticsRecord>(2), true), DomainError);
  }

  TEST_CASE("volume identity and monotonicity on synthetic records") {
    const auto good = synthetic([](double t) { return std::exp(-t); },
                                [](double t) { return -std::exp(-t); }, 200, 2.0);
    CHECK(check_volume_identity(good, 1e-3).passed);
    CHECK(check_liouville_monotone(good, 1e-6).passed);

    const auto bad = synthetic([](double t) { return std::exp(-t); },
                               [](double t) { return -1.1 * std::exp(-t); }, 200, 2.0);
    const Check c = check_volume_identity(bad, 1e-3);
    CHECK_FALSE(c.passed);
    CHECK(c.margin < 0.0);

    auto rising = good;
    rising[50].F_liouville += 1.0;
    CHECK_FALSE(check_liouville_monotone(rising, 1e-6).passed);
  }

  TEST_CASE("grad f check stops at t_stop") {
    auto recs = synthetic([](double) { return 1.0; }, [](double) { return 0.0; }, 10, 1.0);
    for (std::size_t s = 0; s < recs.size(); ++s) recs[s].sup_grad_f_sq = 1.0 - 0.05 * s;
    recs[10].sup_grad_f_sq = 5.0;
    CHECK(check_grad_f_nonincreasing(recs, 1e-8, 0.95).passed);
    CHECK_FALSE(check_grad_f_nonincreasing(recs, 1e-8, 1.0).passed);
  }

  TEST_CASE("center of mass") {
    auto m = sphere(4);
    const std::size_t n = m->num_vertices();
    const auto c0 = center_of_mass(make_state(m, spec(0), ScalarField(n, 0.4), TkField(1, n)));
    for (double c : c0) CHECK(std::abs(c) <= 1e-12);
    ScalarField u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = 0.3 * m->positions[i][2] / std::sqrt(2.0);
    const auto c1 = center_of_mass(make_state(m, spec(0), u, TkField(1, n)));
    CHECK(c1[2] > 0.05);
    CHECK(std::abs(c1[0]) <= 1e-10);
  }

  TEST_CASE("convergence probe on the round nontrivial fixed point") {
    auto m = sphere(4);
    const std::size_t n = m->num_vertices();
    const FlowState s = make_state(m, spec(1), ScalarField(n, std::log(1.0 / 16.0)), TkField(1, n));
    const ConvergenceReport rep = convergence_probe(s);
    CHECK(rep.converged);
    CHECK(rep.mean_exp_u == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(rep.rel_var_exp_u <= 1e-20);
    CHECK(rep.trace_variance <= 1e-20);
    ScalarField u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(1.0 / 16.0) + 0.3 * m->positions[i][2];
    CHECK_FALSE(convergence_probe(make_state(m, spec(1), u, TkField(1, n))).converged);
  }

  TEST_CASE("measured records agree with the functionals") {
    auto m = sphere(3);
    const std::size_t n = m->num_vertices();
    ScalarField u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = 0.2 * m->positions[i][0];
    const FlowState s = make_state(m, spec(1, 1), u, TkField(1, n), 0.3);
    const DiagnosticsRecord r = measure(s, true);
    CHECK(r.volume == doctest::Approx(volume(s)).epsilon(1e-14));
    CHECK(r.volume_rate == doctest::Approx(volume_rate(s)).epsilon(1e-12));
    CHECK(r.F_liouville == doctest::Approx(liouville_energy(s).value).epsilon(1e-12));
    CHECK(r.chern.at(0) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    CHECK(r.diameter > 0.0);
    CHECK(std::isnan(measure(s, false).diameter));
  }
}
