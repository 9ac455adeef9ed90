#include "rym/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <utility>

#include "rym/errors.hpp"

namespace rym {

namespace {

using Tri = std::array<int, 3>;
using Corners = std::array<Vec3, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

// Fills every derived quantity from positions, triangle indices and per-triangle
// corner coordinates (unwrapped for the torus).
void finalize(MeshSurface& m, const std::vector<Tri>& tris, const std::vector<Corners>& local,
              const std::vector<double>& measure) {
  const std::size_t nv = m.positions.size();
  const std::size_t nt = tris.size();
  auto& geo = m.triangles;
  geo.corners = tris;
  geo.area.assign(nt, 0.0);
  geo.grad_basis.assign(nt, {});
  m.vertex_areas.assign(nv, 0.0);

  std::map<std::pair<int, int>, MeshEdge> edge_map;
  std::map<std::pair<int, int>, int> edge_faces;

  for (std::size_t t = 0; t < nt; ++t) {
    const Corners& p = local[t];
    const Vec3 n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
    const double twice_area = norm3(n);
    if (!(twice_area > 0.0)) throw DomainError("degenerate triangle in mesh");
    const Vec3 nhat = scale(n, 1.0 / twice_area);
    geo.area[t] = 0.5 * twice_area;
    for (int k = 0; k < 3; ++k) {
      const Vec3& a = p[(k + 1) % 3];
      const Vec3& b = p[(k + 2) % 3];
      geo.grad_basis[t][k] = scale(cross(nhat, sub(b, a)), 1.0 / twice_area);
      m.vertex_areas[tris[t][k]] += (measure.empty() ? geo.area[t] : measure[t]) / 3.0;

      // Corner k is opposite edge (k+1, k+2).
      const Vec3 ea = sub(a, p[k]);
      const Vec3 eb = sub(b, p[k]);
      const double cot = dot3(ea, eb) / norm3(cross(ea, eb));
      int i = tris[t][(k + 1) % 3];
      int j = tris[t][(k + 2) % 3];
      if (i > j) std::swap(i, j);
      auto& e = edge_map[{i, j}];
      e.i = i;
      e.j = j;
      e.weight += 0.5 * cot;
      e.length = norm3(sub(b, a));
      ++edge_faces[{i, j}];
    }
  }
  for (const auto& [key, count] : edge_faces)
    if (count != 2) throw DomainError("mesh is not a closed 2-manifold");

  m.edges.clear();
  m.edges.reserve(edge_map.size());
  for (auto& [key, e] : edge_map) m.edges.push_back(e);

  // CSR adjacency, neighbours in ascending order.
  std::vector<std::vector<std::array<double, 3>>> rows(nv);
  for (const auto& e : m.edges) {
    rows[e.i].push_back({static_cast<double>(e.j), e.weight, e.length});
    rows[e.j].push_back({static_cast<double>(e.i), e.weight, e.length});
  }
  auto& adj = m.adjacency;
  adj.row_ptr.assign(nv + 1, 0);
  adj.col.clear();
  adj.weight.clear();
  m.adjacency_length.clear();
  for (std::size_t i = 0; i < nv; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    for (const auto& r : rows[i]) {
      adj.col.push_back(static_cast<int>(r[0]));
      adj.weight.push_back(r[1]);
      m.adjacency_length.push_back(r[2]);
    }
    adj.row_ptr[i + 1] = static_cast<int>(adj.col.size());
  }

  std::vector<std::vector<int>> incident(nv);
  for (std::size_t t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) incident[tris[t][k]].push_back(static_cast<int>(t));
  m.star.row_ptr.assign(nv + 1, 0);
  m.star.tri.clear();
  for (std::size_t i = 0; i < nv; ++i) {
    m.star.tri.insert(m.star.tri.end(), incident[i].begin(), incident[i].end());
    m.star.row_ptr[i + 1] = static_cast<int>(m.star.tri.size());
  }

  m.inv_vertex_areas.resize(nv);
  double area = 0.0;
  m.laplacian_bound = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    m.inv_vertex_areas[i] = 1.0 / m.vertex_areas[i];
    area += m.vertex_areas[i];
    double wsum = 0.0;
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e) wsum += std::abs(adj.weight[e]);
    m.laplacian_bound = std::max(m.laplacian_bound, 2.0 * wsum / m.vertex_areas[i]);
  }
  m.area = area;

  const long euler = static_cast<long>(nv) - static_cast<long>(m.edges.size()) +
                     static_cast<long>(nt);
  if (euler != m.chi) throw DomainError("mesh Euler characteristic mismatch");

  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a(h, m.positions.data(), m.positions.size() * sizeof(Vec3));
  h = fnv1a(h, tris.data(), tris.size() * sizeof(Tri));
  m.hash = h;
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  return kind == SurfaceKind::torus ? "torus" : "sphere";
}

MeshSurface build_torus_mesh(int n) {
  if (n < 8 || n % 2 != 0) throw DomainError("torus resolution must be even and >= 8");
  MeshSurface m;
  m.kind = SurfaceKind::torus;
  m.resolution = n;
  m.R_sigma = 0.0;
  m.chi = 0;
  const double h = 2.0 * std::numbers::pi / n;
  auto id = [n](int i, int j) { return ((i % n) + n) % n + n * (((j % n) + n) % n); };
  m.positions.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m.positions[id(i, j)] = {i * h, j * h, 0.0};

  std::vector<Tri> tris;
  std::vector<Corners> local;
  tris.reserve(2 * n * n);
  local.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec3 a{i * h, j * h, 0.0}, b{(i + 1) * h, j * h, 0.0};
      const Vec3 c{(i + 1) * h, (j + 1) * h, 0.0}, d{i * h, (j + 1) * h, 0.0};
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      local.push_back({a, b, c});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      local.push_back({a, c, d});
    }
  }
  finalize(m, tris, local, {});
  m.area = 4.0 * std::numbers::pi * std::numbers::pi;
  return m;
}

MeshSurface build_sphere_mesh(int subdiv) {
  if (subdiv < 3) throw DomainError("sphere subdivision level must be >= 3");
  MeshSurface m;
  m.kind = SurfaceKind::sphere;
  m.resolution = subdiv;
  m.R_sigma = 1.0;
  m.chi = 2;

  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {{-1, g, 0}, {1, g, 0},  {-1, -g, 0}, {1, -g, 0},
                           {0, -1, g}, {0, 1, g},  {0, -1, -g}, {0, 1, -g},
                           {g, 0, -1}, {g, 0, 1},  {-g, 0, -1}, {-g, 0, 1}};
  std::vector<Tri> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  const double radius = std::sqrt(2.0);
  auto project = [radius](Vec3 p) { return scale(p, radius / norm3(p)); };
  for (auto& p : pts) p = project(p);

  for (int level = 0; level < subdiv; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3& pa = pts[a];
      const Vec3& pb = pts[b];
      pts.push_back(project({pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]}));
      const int idx = static_cast<int>(pts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  m.positions = pts;
  // Vertex areas use the spherical triangles, so they sum to 8 pi; gradients
  // and cotangent weights use the flat ones.
  std::vector<Corners> local(tris.size());
  std::vector<double> measure(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Vec3 &a = pts[tris[t][0]], &b = pts[tris[t][1]], &c = pts[tris[t][2]];
    local[t] = {a, b, c};
    const double excess = 2.0 * std::atan2(std::abs(dot3(a, cross(b, c))),
                                           radius * radius * radius +
                                               radius * (dot3(a, b) + dot3(b, c) + dot3(c, a)));
    measure[t] = radius * radius * excess;
  }
  finalize(m, tris, local, measure);
  for (const auto& e : m.edges)
    if (e.weight < 0.0) throw DomainError("icosphere produced a negative cotangent weight");
  return m;
}

ScalarField laplacian_apply(const MeshSurface& mesh, const ScalarField& phi) {
  ScalarField out(phi.size());
  kernels::laplacian(mesh.adjacency, mesh.inv_vertex_areas, phi.span(), out.span());
  return out;
}

namespace {

ScalarField average_triangle_values(const MeshSurface& mesh, const std::vector<double>& q) {
  ScalarField out(mesh.num_vertices());
  kernels::vertex_lump(mesh.triangles, mesh.star, mesh.inv_vertex_areas, q, out.span());
  return out;
}

std::vector<Vec3> gradients(const MeshSurface& mesh, const ScalarField& phi) {
  std::vector<Vec3> g(mesh.num_triangles());
  kernels::triangle_gradients(mesh.triangles, phi.span(), g);
  return g;
}

}  // namespace

ScalarField grad_norm_sq(const MeshSurface& mesh, const ScalarField& phi) {
  const auto g = gradients(mesh, phi);
  std::vector<double> q(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) q[t] = dot3(g[t], g[t]);
  return average_triangle_values(mesh, q);
}

ScalarField grad_dot(const MeshSurface& mesh, const ScalarField& a, const ScalarField& b) {
  const auto ga = gradients(mesh, a);
  const auto gb = gradients(mesh, b);
  std::vector<double> q(ga.size());
  for (std::size_t t = 0; t < ga.size(); ++t) q[t] = dot3(ga[t], gb[t]);
  return average_triangle_values(mesh, q);
}

ScalarField grad_quadratic_form(const MeshSurface& mesh, const TkField& f,
                                const Eigen::MatrixXd& h) {
  const std::size_t k = f.rank();
  std::vector<std::vector<Vec3>> g(k);
  for (std::size_t I = 0; I < k; ++I) g[I] = gradients(mesh, f[I]);
  std::vector<double> q(mesh.num_triangles(), 0.0);
  for (std::size_t t = 0; t < q.size(); ++t) {
    double acc = 0.0;
    for (std::size_t I = 0; I < k; ++I)
      for (std::size_t J = 0; J < k; ++J) acc += h(I, J) * dot3(g[I][t], g[J][t]);
    q[t] = acc;
  }
  return average_triangle_values(mesh, q);
}

double integrate(const MeshSurface& mesh, std::span<const double> phi) {
  return kernels::weighted_sum(phi, mesh.vertex_areas);
}

double integrate(const MeshSurface& mesh, const ScalarField& phi) {
  return integrate(mesh, phi.span());
}

double dirichlet_energy(const MeshSurface& mesh, const ScalarField& phi) {
  const auto g = gradients(mesh, phi);
  std::vector<double> q(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) q[t] = dot3(g[t], g[t]);
  return kernels::weighted_sum(q, mesh.triangles.area);
}

std::vector<double> conformal_distances(const MeshSurface& mesh, const ScalarField& u,
                                        int source) {
  const auto& adj = mesh.adjacency;
  const std::size_t nv = mesh.num_vertices();
  std::vector<double> len(adj.col.size());
  for (std::size_t i = 0; i < nv; ++i)
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      len[e] = mesh.adjacency_length[e] * std::exp(0.25 * (u[i] + u[adj.col[e]]));
  std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e) {
      const int j = adj.col[e];
      const double nd = d + len[e];
      if (nd < dist[j]) {
        dist[j] = nd;
        pq.push({nd, j});
      }
    }
  }
  return dist;
}

double geodesic_diameter(const MeshSurface& mesh, const ScalarField& u, int sources) {
  const std::size_t nv = mesh.num_vertices();
  sources = std::max(1, std::min<int>(sources, static_cast<int>(nv)));
  double diameter = 0.0;
  int next = 0;
  std::vector<double> nearest(nv, std::numeric_limits<double>::infinity());
  for (int s = 0; s < sources; ++s) {
    const auto d = conformal_distances(mesh, u, next);
    double far = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      far = std::max(far, d[i]);
      nearest[i] = std::min(nearest[i], d[i]);
    }
    diameter = std::max(diameter, far);
    next = static_cast<int>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    if (nearest[next] == 0.0) break;
  }
  return diameter;
}

}  // namespace rym
