#pragma once

#include <array>
#include <vector>

#include "polyqs/complex.hpp"
#include "polyqs/finite_metric.hpp"

namespace polyqs {

// Three triangles with common apex over a (possibly degenerate) triangle with
// sides d1 = |A0 A1|, d2 = |A1 A2|, d3 = |A2 A0|. Vertices 0..2 are A0..A2,
// vertex 3 is the apex z0. Triangle i is (A_i, A_{i+1}, z0).
struct TriangleComplexK {
  MetricComplex complex;
  std::array<int, 3> boundary_edges{};   // edge indices of lengths d1, d2, d3
  // Correspondence from the subdivided triangle S': its vertices
  // (p1, p2, p3, barycenter) go to these complex vertices.
  std::array<int, 4> iso{0, 1, 2, 3};
  double ratio = 1;                      // max d_i / min d_i
};

// Requires d_i > 0 and d_i <= d_j + d_k. Throws InputError otherwise.
TriangleComplexK triangle_complex(double d1, double d2, double d3);

// Barycentric subdivision into three triangles per face. The new vertex for
// face t has id vertex_count + t; face t yields faces 3t..3t+2:
// (v0, v1, g), (v1, v2, g), (v2, v0, g).
struct Subdivision {
  MetricComplex complex;
  std::vector<int> barycenter;           // per original face
  std::size_t original_vertices = 0;
};

Subdivision subdivide3(const MetricComplex& Z);

// Replaces every face of Z by triangle_complex of its prescribed side lengths
// (edge_lengths indexed like Z.edges), glued along the original edges. The
// result has the vertex ids and face order of subdivide3(Z); f is the identity.
struct AssembledY {
  MetricComplex Y;
  PointMap f;
};

AssembledY assemble_Y(const MetricComplex& Z, const Subdivision& Zp, const std::vector<double>& edge_lengths);

inline constexpr int kSnowsphereMaxStage = 4;

struct Snowsphere {
  MetricComplex complex;
  std::vector<std::array<int, 4>> squares;  // counterclockwise seen from outside
  double side = 1;
  int stage = 0;
  std::vector<std::size_t> vertices_at_stage;  // vertex count after each stage
};

// Unit cube surface refined n times; each square is cut in nine and its middle
// replaced by an outward cubical cap. Throws InputError for n > kSnowsphereMaxStage.
Snowsphere snowsphere(int n);

// Rhombus of n x n cells of equilateral triangles with side t, embedded in z = 0.
MetricComplex flat_grid(int n, double t);

// Axis-parallel rectangle [0,w] x [0,h] split into nx x ny squares, two right
// triangles each, embedded in z = 0.
MetricComplex rectangle_mesh(double w, double h, int nx, int ny);

// Equilateral flat torus with n x n rhombic cells of side t (no embedding).
MetricComplex flat_torus(int n, double t);

// Disk of radius R: a fan around the origin out to radius r, then rings at radii
// r * (R/r)^{k/rings}. Vertices on each circle are exact.
MetricComplex annulus_disk(double r, double R, int segments, int rings);

}  // namespace polyqs
