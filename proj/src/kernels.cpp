#include "rym/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rym::kernels {

namespace {

long as_long(std::size_t n) { return static_cast<long>(n); }

}  // namespace

void laplacian(const Adjacency& adj, std::span<const double> inv_area,
               std::span<const double> x, std::span<double> y) {
  const long n = as_long(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = x[i];
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - xi);
    y[i] = inv_area[i] * acc;
  }
}

void stiffness(const Adjacency& adj, std::span<const double> x, std::span<double> y) {
  const long n = as_long(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = x[i];
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - xi);
    y[i] = acc;
  }
}

void shifted_stiffness(const Adjacency& adj, std::span<const double> diag,
                       std::span<const double> x, std::span<double> y) {
  const long n = as_long(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = x[i];
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - xi);
    y[i] = diag[i] * xi - acc;
  }
}

void triangle_gradients(const TriangleGeometry& geo, std::span<const double> x,
                        std::span<Vec3> out) {
  const long nt = as_long(geo.corners.size());
#pragma omp parallel for schedule(static)
  for (long t = 0; t < nt; ++t) {
    const auto& c = geo.corners[t];
    const auto& g = geo.grad_basis[t];
    Vec3 v{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) v[d] += x[c[k]] * g[k][d];
    out[t] = v;
  }
}

void vertex_lump(const TriangleGeometry& geo, const VertexStar& star,
                 std::span<const double> inv_area, std::span<const double> per_triangle,
                 std::span<double> out) {
  const long n = as_long(out.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double num = 0.0;
    for (int s = star.row_ptr[i]; s < star.row_ptr[i + 1]; ++s) {
      const int t = star.tri[s];
      num += geo.area[t] * per_triangle[t];
    }
    out[i] = inv_area[i] * num / 3.0;
  }
}

double weighted_sum(std::span<const double> x, std::span<const double> w) {
  const std::size_t n = x.size();
  const std::size_t nb = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < as_long(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i] * w[i];
    partial[b] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
  return weighted_sum(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const long n = as_long(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void conformal_rate(std::span<const double> u, std::span<const double> lap_u,
                    std::span<const double> quad, double r_sigma, double lambda,
                    std::span<double> du) {
  const long n = as_long(u.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const double em = std::exp(-u[i]);
    du[i] = em * (lap_u[i] - r_sigma) + em * em * quad[i] - lambda;
  }
}

void potential_rate(std::span<const double> u, std::span<const double> phi,
                    std::span<double> df) {
  const long n = as_long(u.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) df[i] = std::exp(-u[i]) * phi[i];
}

}  // namespace rym::kernels
