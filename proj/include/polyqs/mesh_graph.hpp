#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "polyqs/complex.hpp"

namespace polyqs {

enum class Carrier : unsigned char { Vertex = 0, Edge = 1, Face = 2 };

struct MeshNode {
  Carrier kind = Carrier::Vertex;
  int index = 0;                   // vertex, edge or triangle index of the carrier
  int tri = 0;                     // one triangle containing the node
  std::array<double, 3> bary{};    // barycentric weights on tri's vertices
};

// Steiner refinement of a complex. Node ids: original vertices first (same ids),
// then m points per edge (from the lower vertex id to the higher), then the
// interior lattice points of every triangle.
struct MeshGraph {
  int m = 0;
  int stencil = 0;                 // 0: all node pairs of a triangle are joined
  std::vector<MeshNode> nodes;
  std::vector<int> offsets;        // CSR adjacency
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<double> area;        // area share per node
  std::vector<std::vector<int>> triangle_nodes;
  std::vector<Vec3> position;      // empty when the complex has no embedding

  std::size_t size() const { return nodes.size(); }
};

// stencil > 0 joins lattice points whose (primitive) lattice offset has hex norm
// at most `stencil`; used for modulus, where long edges would skip nodes.
MeshGraph mesh_graph(const MetricComplex& c, int m, int stencil = 0);

// Lattice-level node id inside triangle t: weights (i, j, N-i-j)/N on t's vertices.
int lattice_node(const MetricComplex& c, int t, int m, int i, int j);

// Heuristic slack: intrinsic >= graph / (1 + refinement_slack(m)).
inline constexpr double kSlackC0 = 0.5;
double refinement_slack(int m);

inline constexpr double kInfDist = std::numeric_limits<double>::infinity();

std::vector<double> dijkstra(const MeshGraph& g, int source);
std::vector<double> dijkstra(const MeshGraph& g, const std::vector<int>& sources);

// Reusable state for many truncated searches on one graph.
class DijkstraWorkspace {
public:
  explicit DijkstraWorkspace(const MeshGraph& g);
  // Nodes with distance <= limit from the source set, in settle order.
  const std::vector<std::pair<int, double>>& run(const std::vector<int>& sources, double limit);
  double distance(int node) const { return dist_[node]; }

private:
  const MeshGraph& g_;
  std::vector<double> dist_;
  std::vector<int> touched_;
  std::vector<std::pair<int, double>> settled_;
};

// Node sequence of one shortest path from s to t; empty when t is unreachable.
std::vector<int> shortest_path(const MeshGraph& g, int s, int t);

struct DistanceBounds {
  double upper = 0;
  double lower_hint = 0;
};

DistanceBounds intrinsic_distance(const MetricComplex& c, int x, int y, int m);
DistanceBounds intrinsic_distance(const MeshGraph& g, int x, int y);

// Rows of graph distances from every source (|sources| x |targets|, row-major).
std::vector<double> distance_rows(const MeshGraph& g, const std::vector<int>& sources,
                                  const std::vector<int>& targets);

struct InclusionReport {
  double r = kInfDist;             // largest r with N(A, r) inside interior(U S(A))
  double ratio = kInfDist;         // r / diam(A)
  int witness_node = -1;           // first node outside the interior
};

InclusionReport check_neighborhood_inclusion(const MetricComplex& c, const MeshGraph& g, Simplex A);

// Simplex whose relative interior contains the node.
Simplex node_carrier(const MeshNode& n);

}  // namespace polyqs
