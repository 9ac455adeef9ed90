#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <set>

#include "doctest.h"
#include "rym/errors.hpp"
#include "rym/mesh.hpp"

using namespace rym;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField field(const MeshSurface& m, double (*f)(const Vec3&)) {
  ScalarField out(m.num_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(m.positions[i]);
  return out;
}

double max_abs(const ScalarField& a) {
  double e = 0.0;
  for (double v : a) e = std::max(e, std::abs(v));
  return e;
}

ScalarField random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

double weighted_dot(const MeshSurface& m, const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * m.vertex_areas[i];
  return s;
}

double torus_cos_error(int n) {
  const MeshSurface m = build_torus_mesh(n);
  const ScalarField c = field(m, [](const Vec3& p) { return std::cos(p[0]); });
  const ScalarField L = laplacian_apply(m, c);
  double e = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(L[i] + c[i]));
  return e;
}

// Plain Dijkstra over the mesh edge list with conformal edge lengths.
std::vector<double> dijkstra(const MeshSurface& m, const ScalarField& u, int src) {
  std::vector<std::vector<std::pair<int, double>>> adj(m.num_vertices());
  for (const auto& e : m.edges) {
    const double len = e.length * std::exp((u[e.i] + u[e.j]) / 4.0);
    adj[e.i].push_back({e.j, len});
    adj[e.j].push_back({e.i, len});
  }
  std::vector<double> d(m.num_vertices(), INFINITY);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  d[src] = 0.0;
  q.push({0.0, src});
  while (!q.empty()) {
    auto [dist, v] = q.top();
    q.pop();
    if (dist > d[v]) continue;
    for (auto [w, len] : adj[v])
      if (dist + len < d[w]) {
        d[w] = dist + len;
        q.push({d[w], w});
      }
  }
  return d;
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("torus(64) has 4096 vertices and area 4 pi^2") {
    const MeshSurface m = build_torus_mesh(64);
    CHECK(m.num_vertices() == 4096);
    CHECK(m.area == 4.0 * kPi * kPi);
    const double sum = integrate(m, ScalarField(m.num_vertices(), 1.0));
    CHECK(std::abs(sum - 4.0 * kPi * kPi) <= 1e-12 * 4.0 * kPi * kPi);
    CHECK(m.R_sigma == 0.0);
    CHECK(m.chi == 0);
  }

  TEST_CASE("torus Laplacian is the five-point stencil") {
    // cos x is an eigenvector of the stencil with eigenvalue -(2 - 2 cos h) / h^2.
    const int n = 64;
    const double h = 2.0 * kPi / n;
    const MeshSurface m = build_torus_mesh(n);
    const ScalarField c = field(m, [](const Vec3& p) { return std::cos(p[0]); });
    const ScalarField L = laplacian_apply(m, c);
    const double mu = (2.0 - 2.0 * std::cos(h)) / (h * h);
    for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(std::abs(L[i] + mu * c[i]) <= 1e-11);
    CHECK(torus_cos_error(64) <= 2.0 * h * h);
  }

  TEST_CASE("second-order convergence under torus refinement") {
    CHECK(torus_cos_error(16) / torus_cos_error(32) >= 3.5);
    CHECK(torus_cos_error(32) / torus_cos_error(64) >= 3.5);
  }

  TEST_CASE("sphere(4) vertex count, area and Y1 eigenfunction") {
    const MeshSurface m = build_sphere_mesh(4);
    CHECK(m.num_vertices() == 2562);
    CHECK(std::abs(m.area / (8.0 * kPi) - 1.0) <= 1e-3);
    const double sum = integrate(m, ScalarField(m.num_vertices(), 1.0));
    CHECK(std::abs(sum / (8.0 * kPi) - 1.0) <= 1e-3);
    CHECK(m.R_sigma == 1.0);
    CHECK(m.chi == 2);
    CHECK(std::abs(m.R_sigma * sum - 4.0 * kPi * m.chi) <= 1e-3 * 4.0 * kPi * m.chi);

    const ScalarField z = field(m, [](const Vec3& p) { return p[2]; });
    const ScalarField L = laplacian_apply(m, z);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      num += m.vertex_areas[i] * (L[i] + z[i]) * (L[i] + z[i]);
      den += m.vertex_areas[i] * z[i] * z[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-2);
    CHECK(std::abs(integrate(m, z)) <= 1e-6 * m.area);
  }

  TEST_CASE("sphere vertices lie on the radius sqrt(2) sphere") {
    const MeshSurface m = build_sphere_mesh(3);
    for (const auto& p : m.positions)
      REQUIRE(std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - std::sqrt(2.0)) <=
              1e-14);
  }

  TEST_CASE("cotangent weights are positive on icospheres") {
    for (int s : {3, 4}) {
      const MeshSurface m = build_sphere_mesh(s);
      for (const auto& e : m.edges) REQUIRE(e.weight > 0.0);
    }
  }

  TEST_CASE("closed surfaces: two faces per edge and Euler characteristic") {
    for (const MeshSurface& m : {build_torus_mesh(8), build_sphere_mesh(3)}) {
      std::map<std::pair<int, int>, int> faces;
      for (const auto& t : m.triangles.corners)
        for (int k = 0; k < 3; ++k) {
          const int a = t[k], b = t[(k + 1) % 3];
          faces[{std::min(a, b), std::max(a, b)}]++;
        }
      for (const auto& [edge, count] : faces) REQUIRE(count == 2);
      const long V = long(m.num_vertices()), E = long(faces.size()), F = long(m.num_triangles());
      CHECK(V - E + F == m.chi);
    }
  }

  TEST_CASE("Laplacian of a constant vanishes and integrates to zero") {
    for (const MeshSurface& m : {build_torus_mesh(16), build_sphere_mesh(3)}) {
      CHECK(max_abs(laplacian_apply(m, ScalarField(m.num_vertices(), 3.7))) <= 1e-12);
      const ScalarField phi = random_field(m.num_vertices(), 11);
      const ScalarField L = laplacian_apply(m, phi);
      double scale = 0.0;
      for (std::size_t i = 0; i < L.size(); ++i) scale += std::abs(L[i]) * m.vertex_areas[i];
      CHECK(std::abs(integrate(m, L)) <= 1e-12 * scale);
    }
  }

  TEST_CASE("Laplacian is symmetric in the area inner product") {
    for (const MeshSurface& m : {build_torus_mesh(16), build_sphere_mesh(3)}) {
      for (unsigned seed = 1; seed <= 3; ++seed) {
        const ScalarField a = random_field(m.num_vertices(), seed);
        const ScalarField b = random_field(m.num_vertices(), seed + 100);
        const double ab = weighted_dot(m, laplacian_apply(m, a), b);
        const double ba = weighted_dot(m, a, laplacian_apply(m, b));
        CHECK(std::abs(ab - ba) <= 1e-10 * std::max(std::abs(ab), 1.0));
      }
    }
  }

  TEST_CASE("Dirichlet energy of sin x and summation by parts") {
    const MeshSurface m = build_torus_mesh(64);
    const ScalarField s = field(m, [](const Vec3& p) { return std::sin(p[0]); });
    const double D = integrate(m, grad_norm_sq(m, s));
    CHECK(std::abs(D / (2.0 * kPi * kPi) - 1.0) <= 1e-2);
    CHECK(std::abs(D - dirichlet_energy(m, s)) <= 1e-12 * D);

    for (const MeshSurface& mm : {build_torus_mesh(16), build_sphere_mesh(3)}) {
      const ScalarField phi = random_field(mm.num_vertices(), 5);
      const double lhs = integrate(mm, grad_norm_sq(mm, phi));
      ScalarField prod(phi.size());
      const ScalarField L = laplacian_apply(mm, phi);
      for (std::size_t i = 0; i < phi.size(); ++i) prod[i] = -phi[i] * L[i];
      CHECK(std::abs(lhs - integrate(mm, prod)) <= 1e-6 * lhs);
      CHECK(max_abs(grad_norm_sq(mm, ScalarField(mm.num_vertices(), 2.0))) <= 1e-12);
    }
  }

  TEST_CASE("grad_dot and grad_quadratic_form agree with grad_norm_sq") {
    const MeshSurface m = build_sphere_mesh(3);
    const ScalarField a = random_field(m.num_vertices(), 1);
    const ScalarField b = random_field(m.num_vertices(), 2);
    ScalarField apb(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) apb[i] = a[i] + b[i];
    const ScalarField na = grad_norm_sq(m, a), nb = grad_norm_sq(m, b), nab = grad_norm_sq(m, apb);
    const ScalarField ab = grad_dot(m, a, b);
    Eigen::MatrixXd h(2, 2);
    h << 2.0, 0.5, 0.5, 1.0;
    const ScalarField q = grad_quadratic_form(m, TkField({a, b}), h);
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(std::abs(nab[i] - na[i] - nb[i] - 2.0 * ab[i]) <= 1e-10 * (1.0 + nab[i]));
      REQUIRE(std::abs(q[i] - (2.0 * na[i] + ab[i] + nb[i])) <= 1e-10 * (1.0 + q[i]));
    }
  }

  TEST_CASE("sampled diameter against all-pairs shortest paths on torus(16)") {
    const MeshSurface m = build_torus_mesh(16);
    const ScalarField u(m.num_vertices());
    double exact = 0.0;
    for (int s = 0; s < int(m.num_vertices()); ++s)
      for (double d : dijkstra(m, u, s)) exact = std::max(exact, d);
    const double sampled = geodesic_diameter(m, u);
    CHECK(std::abs(sampled / exact - 1.0) <= 0.05);
    CHECK(sampled <= exact * (1.0 + 1e-12));
  }

  TEST_CASE("diameter scales by e^{c/2} under constant shifts") {
    const MeshSurface m = build_sphere_mesh(3);
    const double d0 = geodesic_diameter(m, ScalarField(m.num_vertices(), 0.0));
    for (double c : {-4.0, -1.0, 1.5}) {
      const double d = geodesic_diameter(m, ScalarField(m.num_vertices(), c));
      CHECK(std::abs(d / (d0 * std::exp(c / 2.0)) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("builders reject coarse or malformed resolutions") {
    CHECK_THROWS_AS(build_torus_mesh(6), DomainError);
    CHECK_THROWS_AS(build_torus_mesh(9), DomainError);
    CHECK_THROWS_AS(build_sphere_mesh(2), DomainError);
  }

  TEST_CASE("mesh hashes identify the construction") {
    CHECK(build_torus_mesh(16).hash == build_torus_mesh(16).hash);
    CHECK(build_torus_mesh(16).hash != build_torus_mesh(32).hash);
    CHECK(build_sphere_mesh(3).hash != build_sphere_mesh(4).hash);
  }
}
