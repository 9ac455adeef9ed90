/// @file mesh.hpp
/// @brief Triangulated constant-curvature backgrounds and their discrete operators.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rym/fields.hpp"
#include "rym/kernels.hpp"

namespace rym {

using kernels::Vec3;

enum class SurfaceKind { torus, sphere };

std::string to_string(SurfaceKind kind);

struct MeshEdge {
  int i = 0;
  int j = 0;
  double weight = 0.0;  ///< cotangent weight, dimensionless
  double length = 0.0;  ///< background edge length
};

/// Immutable after construction; safe to share across threads.
struct MeshSurface {
  SurfaceKind kind = SurfaceKind::torus;
  int resolution = 0;  ///< grid size n (torus) or subdivision level (sphere)

  std::vector<Vec3> positions;
  std::vector<MeshEdge> edges;
  kernels::TriangleGeometry triangles;
  kernels::Adjacency adjacency;
  std::vector<double> adjacency_length;  ///< edge length per CSR entry
  kernels::VertexStar star;
  std::vector<double> vertex_areas;
  std::vector<double> inv_vertex_areas;

  double R_sigma = 0.0;
  int chi = 0;
  double area = 0.0;             ///< A_Sigma, equal to the sum of vertex areas
  double laplacian_bound = 0.0;  ///< Gershgorin bound max_i (2/a_i) sum_j w_ij
  std::uint64_t hash = 0;

  std::size_t num_vertices() const { return positions.size(); }
  std::size_t num_triangles() const { return triangles.corners.size(); }
};

/// Flat torus [0,2pi)^2 on an n x n grid, two triangles per cell. Requires n >= 8, even.
MeshSurface build_torus_mesh(int n);

/// Icosphere of radius sqrt(2) (R_Sigma = 1). Requires subdiv >= 3.
MeshSurface build_sphere_mesh(int subdiv);

ScalarField laplacian_apply(const MeshSurface& mesh, const ScalarField& phi);

/// Per-vertex |d phi|^2 in the background metric, lumped from the triangles so
/// that integrate(grad_norm_sq(phi)) equals dirichlet_energy(phi).
ScalarField grad_norm_sq(const MeshSurface& mesh, const ScalarField& phi);

/// Per-vertex <d a, d b> in the background metric.
ScalarField grad_dot(const MeshSurface& mesh, const ScalarField& a, const ScalarField& b);

/// Per-vertex sum_IJ h_IJ <d f^I, d f^J>.
ScalarField grad_quadratic_form(const MeshSurface& mesh, const TkField& f,
                                const Eigen::MatrixXd& h);

/// sum_i phi_i a_i
double integrate(const MeshSurface& mesh, const ScalarField& phi);
double integrate(const MeshSurface& mesh, std::span<const double> phi);

/// sum_T A_T |grad phi_T|^2, which equals sum over edges of w_ij (phi_i - phi_j)^2.
double dirichlet_energy(const MeshSurface& mesh, const ScalarField& phi);

/// Largest shortest-path distance seen from `sources` farthest-point-sampled
/// vertices, with edge ij weighted by length * exp((u_i + u_j) / 4).
double geodesic_diameter(const MeshSurface& mesh, const ScalarField& u, int sources = 32);

/// Single-source shortest paths with the conformal edge lengths above.
std::vector<double> conformal_distances(const MeshSurface& mesh, const ScalarField& u,
                                        int source);

}  // namespace rym
