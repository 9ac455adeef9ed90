// Plain-loop reference versions of the kernels in kernels.cpp.
#include <algorithm>
#include <cmath>

#include "rym/kernels.hpp"

namespace rym::kernels::serial {

void laplacian(const Adjacency& adj, std::span<const double> inv_area,
               std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - x[i]);
    y[i] = inv_area[i] * acc;
  }
}

void stiffness(const Adjacency& adj, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - x[i]);
    y[i] = acc;
  }
}

void shifted_stiffness(const Adjacency& adj, std::span<const double> diag,
                       std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (int e = adj.row_ptr[i]; e < adj.row_ptr[i + 1]; ++e)
      acc += adj.weight[e] * (x[adj.col[e]] - x[i]);
    y[i] = diag[i] * x[i] - acc;
  }
}

void triangle_gradients(const TriangleGeometry& geo, std::span<const double> x,
                        std::span<Vec3> out) {
  for (std::size_t t = 0; t < geo.corners.size(); ++t) {
    Vec3 v{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) v[d] += x[geo.corners[t][k]] * geo.grad_basis[t][k][d];
    out[t] = v;
  }
}

void vertex_lump(const TriangleGeometry& geo, const VertexStar& star,
                 std::span<const double> inv_area, std::span<const double> per_triangle,
                 std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    double num = 0.0;
    for (int s = star.row_ptr[i]; s < star.row_ptr[i + 1]; ++s)
      num += geo.area[star.tri[s]] * per_triangle[star.tri[s]];
    out[i] = inv_area[i] * num / 3.0;
  }
}

double weighted_sum(std::span<const double> x, std::span<const double> w) {
  // Same blocking as the parallel version so results agree bit for bit.
  double total = 0.0;
  for (std::size_t lo = 0; lo < x.size(); lo += kReductionBlock) {
    const std::size_t hi = std::min(x.size(), lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i] * w[i];
    total += acc;
  }
  return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
  return weighted_sum(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void conformal_rate(std::span<const double> u, std::span<const double> lap_u,
                    std::span<const double> quad, double r_sigma, double lambda,
                    std::span<double> du) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double em = std::exp(-u[i]);
    du[i] = em * (lap_u[i] - r_sigma) + em * em * quad[i] - lambda;
  }
}

void potential_rate(std::span<const double> u, std::span<const double> phi,
                    std::span<double> df) {
  for (std::size_t i = 0; i < u.size(); ++i) df[i] = std::exp(-u[i]) * phi[i];
}

}  // namespace rym::kernels::serial
