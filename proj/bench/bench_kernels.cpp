// OpenMP kernels against the serial reference on torus and sphere meshes.
// Arg(0) is a torus of side n, Arg(1) a sphere at subdivision level n.
#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "rym/flow.hpp"
#include "rym/kernels.hpp"
#include "rym/mesh.hpp"

namespace k = rym::kernels;

namespace {

const rym::MeshSurface& mesh_for(const benchmark::State& st) {
  static std::map<std::pair<int, int>, rym::MeshSurface> cache;
  const auto key = std::make_pair(int(st.range(0)), int(st.range(1)));
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, key.first == 0 ? rym::build_torus_mesh(key.second)
                                          : rym::build_sphere_mesh(key.second))
             .first;
  return it->second;
}

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void BM_laplacian(benchmark::State& st) {
  const auto& m = mesh_for(st);
  const auto x = random_vec(m.num_vertices(), 1);
  std::vector<double> y(x.size());
  for (auto _ : st) {
    if constexpr (Parallel) k::laplacian(m.adjacency, m.inv_vertex_areas, x, y);
    else k::serial::laplacian(m.adjacency, m.inv_vertex_areas, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * int64_t(x.size()));
}

template <bool Parallel>
void BM_gradients_and_lump(benchmark::State& st) {
  const auto& m = mesh_for(st);
  const auto x = random_vec(m.num_vertices(), 2);
  std::vector<rym::Vec3> g(m.num_triangles());
  std::vector<double> q(m.num_triangles()), out(m.num_vertices());
  for (auto _ : st) {
    if constexpr (Parallel) k::triangle_gradients(m.triangles, x, g);
    else k::serial::triangle_gradients(m.triangles, x, g);
    for (std::size_t t = 0; t < g.size(); ++t)
      q[t] = g[t][0] * g[t][0] + g[t][1] * g[t][1] + g[t][2] * g[t][2];
    if constexpr (Parallel) k::vertex_lump(m.triangles, m.star, m.inv_vertex_areas, q, out);
    else k::serial::vertex_lump(m.triangles, m.star, m.inv_vertex_areas, q, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * int64_t(m.num_triangles()));
}

template <bool Parallel>
void BM_conformal_rate(benchmark::State& st) {
  const auto& m = mesh_for(st);
  const std::size_t n = m.num_vertices();
  const auto u = random_vec(n, 3), lap = random_vec(n, 4), quad = random_vec(n, 5);
  std::vector<double> y(n);
  for (auto _ : st) {
    if constexpr (Parallel) k::conformal_rate(u, lap, quad, 1.0, 1.0, y);
    else k::serial::conformal_rate(u, lap, quad, 1.0, 1.0, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

template <bool Parallel>
void BM_weighted_sum(benchmark::State& st) {
  const auto& m = mesh_for(st);
  const auto x = random_vec(m.num_vertices(), 6);
  for (auto _ : st) {
    double s;
    if constexpr (Parallel) s = k::weighted_sum(x, m.vertex_areas);
    else s = k::serial::weighted_sum(x, m.vertex_areas);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * int64_t(x.size()));
}

// One full RK4 step; exercises every kernel in the order the flow uses them.
void BM_rk4_step(benchmark::State& st) {
  auto m = std::make_shared<const rym::MeshSurface>(mesh_for(st));
  const std::size_t n = m->num_vertices();
  rym::BundleSpec b;
  b.c1 = {1};
  rym::ScalarField u(random_vec(n, 7));
  for (auto& v : u) v *= 0.1;
  const rym::FlowState s = rym::make_state(m, b, u, rym::TkField(1, n));
  const double dt = rym::stability_dt(s, rym::StepControl{});
  for (auto _ : st) benchmark::DoNotOptimize(rym::step_rk(s, dt).u.data());
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({0, 64})->Args({0, 256})->Args({1, 4})->Args({1, 6});
}

}  // namespace

BENCHMARK(BM_laplacian<true>)->Apply(sizes);
BENCHMARK(BM_laplacian<false>)->Apply(sizes);
BENCHMARK(BM_gradients_and_lump<true>)->Apply(sizes);
BENCHMARK(BM_gradients_and_lump<false>)->Apply(sizes);
BENCHMARK(BM_conformal_rate<true>)->Apply(sizes);
BENCHMARK(BM_conformal_rate<false>)->Apply(sizes);
BENCHMARK(BM_weighted_sum<true>)->Apply(sizes);
BENCHMARK(BM_weighted_sum<false>)->Apply(sizes);
BENCHMARK(BM_rk4_step)->Apply(sizes);

BENCHMARK_MAIN();
