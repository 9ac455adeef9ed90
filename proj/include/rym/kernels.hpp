/// @file kernels.hpp
/// @brief Data-parallel mesh kernels (OpenMP) and their serial reference twins.
///
/// Every kernel in rym::kernels has a counterpart with the same signature in
/// rym::kernels::serial. The serial versions are plain loops kept as the
/// reference for tests and the benchmark; library code calls the parallel ones.
///
/// Reductions never depend on the thread count: weighted_sum() splits the
/// range into fixed-size blocks, reduces each block in index order, then adds
/// the block partials in order.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rym::kernels {

using Vec3 = std::array<double, 3>;

/// Symmetric vertex adjacency in CSR form with one cotangent weight per entry.
struct Adjacency {
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> weight;
};

/// Per-triangle data for piecewise-linear gradients.
struct TriangleGeometry {
  std::vector<std::array<int, 3>> corners;
  std::vector<double> area;
  /// Gradients of the three barycentric hat functions, constant on the triangle.
  std::vector<std::array<Vec3, 3>> grad_basis;
};

/// Incident triangles of each vertex (CSR).
struct VertexStar {
  std::vector<int> row_ptr;
  std::vector<int> tri;
};

inline constexpr std::size_t kReductionBlock = 1024;

/// y_i = inv_area_i * sum_j w_ij (x_j - x_i)
void laplacian(const Adjacency& adj, std::span<const double> inv_area,
               std::span<const double> x, std::span<double> y);

/// y_i = sum_j w_ij (x_j - x_i)
void stiffness(const Adjacency& adj, std::span<const double> x, std::span<double> y);

/// y_i = diag_i x_i - sum_j w_ij (x_j - x_i). SPD whenever diag > 0 and w >= 0.
void shifted_stiffness(const Adjacency& adj, std::span<const double> diag,
                       std::span<const double> x, std::span<double> y);

/// out_t = sum_k x[corner_k] * grad_basis_k
void triangle_gradients(const TriangleGeometry& geo, std::span<const double> x,
                        std::span<Vec3> out);

/// out_i = inv_area_i * sum_{T star i} area_T * q_T / 3. Summing out_i * a_i
/// returns sum_T area_T * q_T exactly.
void vertex_lump(const TriangleGeometry& geo, const VertexStar& star,
                 std::span<const double> inv_area, std::span<const double> per_triangle,
                 std::span<double> out);

double weighted_sum(std::span<const double> x, std::span<const double> w);
double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// du_i = e^{-u_i} (lap_u_i - r_sigma) + e^{-2 u_i} quad_i - lambda
void conformal_rate(std::span<const double> u, std::span<const double> lap_u,
                    std::span<const double> quad, double r_sigma, double lambda,
                    std::span<double> du);

/// df_i = e^{-u_i} phi_i
void potential_rate(std::span<const double> u, std::span<const double> phi,
                    std::span<double> df);

namespace serial {

void laplacian(const Adjacency& adj, std::span<const double> inv_area,
               std::span<const double> x, std::span<double> y);
void stiffness(const Adjacency& adj, std::span<const double> x, std::span<double> y);
void shifted_stiffness(const Adjacency& adj, std::span<const double> diag,
                       std::span<const double> x, std::span<double> y);
void triangle_gradients(const TriangleGeometry& geo, std::span<const double> x,
                        std::span<Vec3> out);
void vertex_lump(const TriangleGeometry& geo, const VertexStar& star,
                 std::span<const double> inv_area, std::span<const double> per_triangle,
                 std::span<double> out);
double weighted_sum(std::span<const double> x, std::span<const double> w);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void conformal_rate(std::span<const double> u, std::span<const double> lap_u,
                    std::span<const double> quad, double r_sigma, double lambda,
                    std::span<double> du);
void potential_rate(std::span<const double> u, std::span<const double> phi,
                    std::span<double> df);

}  // namespace serial
}  // namespace rym::kernels
