#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace polyqs {

// len[0] = |v0 v1|, len[1] = |v1 v2|, len[2] = |v2 v0|.
struct Triangle {
  std::array<int, 3> v{};
  std::array<double, 3> len{};
};

struct Edge {
  int a = 0, b = 0;                // a < b
  double length = 0;
  std::vector<int> triangles;      // incident triangles, in build order
};

using Vec3 = std::array<double, 3>;
using Vec2 = std::array<double, 2>;

// A 2-dimensional metric simplicial complex: Euclidean triangles glued
// isometrically along shared edges. Immutable after build_complex.
struct MetricComplex {
  std::vector<std::string> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  std::vector<Vec3> embedding;     // empty when no embedding is known

  std::vector<std::array<int, 3>> triangle_edges;  // edge of side i (v_i, v_{i+1})
  std::vector<std::vector<int>> vertex_triangles;
  std::vector<std::vector<int>> vertex_edges;
  std::unordered_map<std::uint64_t, int> edge_lookup;

  std::size_t vertex_count() const { return vertices.size(); }
  bool has_embedding() const { return !embedding.empty(); }
  int edge_index(int a, int b) const;  // -1 when absent
  std::vector<std::vector<int>> vertex_adjacency() const;
};

struct BuildOptions {
  bool strict_manifold = true;     // reject edges with more than two triangles
  double length_tol = 1e-9;        // shared-edge consistency, relative to max(1, length)
};

MetricComplex build_complex(std::vector<std::string> ids, std::vector<Triangle> triangles,
                            std::vector<Vec3> embedding = {}, BuildOptions opts = {});

// Side lengths taken from the embedding coordinates.
MetricComplex complex_from_embedding(std::vector<Vec3> coords, const std::vector<std::array<int, 3>>& tris,
                                     BuildOptions opts = {});

std::vector<std::string> index_ids(std::size_t n);

// Planar realization of a triangle: P0 = (0,0), P1 = (len0, 0), P2 above the x axis.
std::array<Vec2, 3> planar_realization(const Triangle& t);
double triangle_area(const Triangle& t);
double triangle_diameter(const Triangle& t);
double min_angle(const Triangle& t);

// Every interior edge is traversed in opposite directions by its two triangles.
bool consistently_oriented(const MetricComplex& c);

// Distance from vertex x to the union of faces of incident simplices not containing x.
double epsilon_x(const MetricComplex& c, int x);

struct QCCertificate {
  double M1 = 0, M2 = 1, M3 = 1, M = 0;
  int M1_vertex = -1, M2_triangle = -1, M3_vertex = -1;
};

QCCertificate qc_certificate(const MetricComplex& c);

// Normalized bi-Lipschitz constant of the linear map of t onto the standard simplex.
double shape_constant(const Triangle& t);

struct Simplex {
  int dim = 0;                     // 0 vertex, 1 edge, 2 triangle
  int index = 0;
  auto operator<=>(const Simplex&) const = default;
};

std::vector<int> simplex_vertices(const MetricComplex& c, Simplex s);
double simplex_diameter(const MetricComplex& c, Simplex s);

// S(x): simplices containing vertex x (triangles, edges and x itself), sorted.
std::vector<Simplex> star_sets(const MetricComplex& c, int x);
// S(A): simplices intersecting A, sorted.
std::vector<Simplex> S_of(const MetricComplex& c, Simplex A);
// Vertices at combinatorial distance at most K from v over the 1-skeleton, sorted.
std::vector<int> vertex_k_star(const MetricComplex& c, int v, int K);

// Same combinatorics, every edge of length t.
MetricComplex with_uniform_lengths(const MetricComplex& c, double t);

}  // namespace polyqs
