#include <random>

#include "doctest.h"
#include "rym/kernels.hpp"
#include "rym/mesh.hpp"

using namespace rym;
namespace k = rym::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

// The parallel kernels must reproduce the serial reference bit for bit.
TEST_SUITE("kernels") {
  TEST_CASE("laplacian, stiffness and shifted_stiffness match the serial reference") {
    for (const MeshSurface& m : {build_torus_mesh(32), build_sphere_mesh(4)}) {
      const std::size_t n = m.num_vertices();
      const auto x = random_vec(n, 1);
      const auto diag = random_vec(n, 2, 0.5, 2.0);
      std::vector<double> a(n), b(n);
      k::laplacian(m.adjacency, m.inv_vertex_areas, x, a);
      k::serial::laplacian(m.adjacency, m.inv_vertex_areas, x, b);
      CHECK(a == b);
      k::stiffness(m.adjacency, x, a);
      k::serial::stiffness(m.adjacency, x, b);
      CHECK(a == b);
      k::shifted_stiffness(m.adjacency, diag, x, a);
      k::serial::shifted_stiffness(m.adjacency, diag, x, b);
      CHECK(a == b);
    }
  }

  TEST_CASE("triangle gradients and vertex lumping match the serial reference") {
    const MeshSurface m = build_sphere_mesh(4);
    const auto x = random_vec(m.num_vertices(), 3);
    std::vector<Vec3> ga(m.num_triangles()), gb(m.num_triangles());
    k::triangle_gradients(m.triangles, x, ga);
    k::serial::triangle_gradients(m.triangles, x, gb);
    CHECK(ga == gb);

    const auto q = random_vec(m.num_triangles(), 4, 0.0, 1.0);
    std::vector<double> la(m.num_vertices()), lb(m.num_vertices());
    k::vertex_lump(m.triangles, m.star, m.inv_vertex_areas, q, la);
    k::serial::vertex_lump(m.triangles, m.star, m.inv_vertex_areas, q, lb);
    CHECK(la == lb);

    // Lumping preserves the integral.
    double tri = 0.0, vert = 0.0;
    for (std::size_t t = 0; t < q.size(); ++t) tri += m.triangles.area[t] * q[t];
    for (std::size_t i = 0; i < la.size(); ++i) vert += la[i] * m.vertex_areas[i];
    CHECK(std::abs(tri - vert) <= 1e-12 * tri);
  }

  TEST_CASE("reductions are deterministic and blocked identically") {
    const auto x = random_vec(10000, 5);
    const auto w = random_vec(10000, 6);
    CHECK(k::weighted_sum(x, w) == k::serial::weighted_sum(x, w));
    CHECK(k::dot(x, w) == k::serial::dot(x, w));
    CHECK(k::weighted_sum(x, w) == k::weighted_sum(x, w));
    long double exact = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) exact += (long double)x[i] * w[i];
    CHECK(std::abs(k::dot(x, w) - double(exact)) <= 1e-12 * 100.0);
  }

  TEST_CASE("pointwise kernels match the serial reference and their formulas") {
    const std::size_t n = 3000;
    const auto u = random_vec(n, 7);
    const auto lap = random_vec(n, 8);
    const auto quad = random_vec(n, 9, 0.0, 1.0);
    std::vector<double> a(n), b(n);
    k::conformal_rate(u, lap, quad, 1.0, 1.0, a);
    k::serial::conformal_rate(u, lap, quad, 1.0, 1.0, b);
    CHECK(a == b);
    for (std::size_t i = 0; i < n; i += 97) {
      const double expect =
          std::exp(-u[i]) * (lap[i] - 1.0) + std::exp(-2.0 * u[i]) * quad[i] - 1.0;
      CHECK(std::abs(a[i] - expect) <= 1e-13 * (1.0 + std::abs(expect)));
    }
    k::potential_rate(u, lap, a);
    k::serial::potential_rate(u, lap, b);
    CHECK(a == b);
    CHECK(std::abs(a[5] - std::exp(-u[5]) * lap[5]) <= 1e-15);

    std::vector<double> y1 = lap, y2 = lap;
    k::axpy(0.25, u, y1);
    k::serial::axpy(0.25, u, y2);
    CHECK(y1 == y2);
  }
}
