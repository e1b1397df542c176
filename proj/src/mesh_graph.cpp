#include "polyqs/mesh_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "polyqs/errors.hpp"
#include "polyqs/parallel.hpp"

namespace polyqs {

namespace {

using HeapItem = std::pair<double, int>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>>;

struct LatticePoint {
  int i, j, k;
};

std::vector<LatticePoint> lattice(int N) {
  std::vector<LatticePoint> pts;
  for (int i = N; i >= 0; --i)
    for (int j = N - i; j >= 0; --j) pts.push_back({i, j, N - i - j});
  return pts;
}

int interior_index(int N, int i, int j) {
  // Interior points ordered by i = 1..N-2, then j = 1..N-1-i.
  int base = 0;
  for (int a = 1; a < i; ++a) base += N - 1 - a;
  return base + (j - 1);
}

}  // namespace

double refinement_slack(int m) { return m <= 0 ? 2 * kSlackC0 : kSlackC0 / m; }

Simplex node_carrier(const MeshNode& n) { return {int(n.kind), n.index}; }

int lattice_node(const MetricComplex& c, int t, int m, int i, int j) {
  const int N = m + 1;
  const int k = N - i - j;
  const Triangle& tr = c.triangles[t];
  const int nv = int(c.vertex_count());
  const int ne = int(c.edges.size());
  if (j == 0 && k == 0) return tr.v[0];
  if (i == 0 && k == 0) return tr.v[1];
  if (i == 0 && j == 0) return tr.v[2];
  auto edge_point = [&](int side, int from_vertex, int steps_from) {
    const int e = c.triangle_edges[t][side];
    const int idx = (c.edges[e].a == from_vertex) ? steps_from - 1 : N - steps_from - 1;
    return nv + e * m + idx;
  };
  if (k == 0) return edge_point(0, tr.v[0], j);
  if (i == 0) return edge_point(1, tr.v[1], k);
  if (j == 0) return edge_point(2, tr.v[2], i);
  const int per = (N - 1) * (N - 2) / 2;
  return nv + ne * m + t * per + interior_index(N, i, j);
}

MeshGraph mesh_graph(const MetricComplex& c, int m, int stencil) {
  if (m < 0) throw InputError("refinement level must be nonnegative");
  const int N = m + 1;
  const int nv = int(c.vertex_count());
  const int ne = int(c.edges.size());
  const int nt = int(c.triangles.size());
  const int per = (N - 1) * (N - 2) / 2;
  MeshGraph g;
  g.m = m;
  g.stencil = stencil;
  g.nodes.resize(std::size_t(nv) + std::size_t(ne) * m + std::size_t(nt) * per);
  g.area.assign(g.nodes.size(), 0.0);
  g.triangle_nodes.resize(nt);

  const auto pts = lattice(N);
  const std::size_t P = pts.size();
  // Lattice pairs joined inside one triangle (same for every triangle).
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = p + 1; q < P; ++q) {
      const int di = pts[q].i - pts[p].i, dj = pts[q].j - pts[p].j, dk = pts[q].k - pts[p].k;
      if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
      if (stencil > 0 && std::max({std::abs(di), std::abs(dj), std::abs(dk)}) > stencil) continue;
      pairs.emplace_back(int(p), int(q));
    }
  }

  std::vector<std::vector<std::pair<int, double>>> out(g.nodes.size());
  for (int t = 0; t < nt; ++t) {
    const Triangle& tr = c.triangles[t];
    const auto P3 = planar_realization(tr);
    const double A = triangle_area(tr);
    std::vector<int> ids(P);
    std::vector<Vec2> xy(P);
    for (std::size_t p = 0; p < P; ++p) {
      const auto [i, j, k] = pts[p];
      const int id = lattice_node(c, t, m, i, j);
      ids[p] = id;
      xy[p] = {(i * P3[0][0] + j * P3[1][0] + k * P3[2][0]) / N, (i * P3[0][1] + j * P3[1][1] + k * P3[2][1]) / N};
      MeshNode& node = g.nodes[id];
      const int zeros = (i == 0) + (j == 0) + (k == 0);
      if (zeros == 2) {
        node.kind = Carrier::Vertex;
        node.index = id;
      } else if (zeros == 1) {
        node.kind = Carrier::Edge;
        node.index = c.triangle_edges[t][k == 0 ? 0 : (i == 0 ? 1 : 2)];
      } else {
        node.kind = Carrier::Face;
        node.index = t;
      }
      if (zeros == 0) {
        node.tri = t;
        node.bary = {double(i) / N, double(j) / N, double(k) / N};
      }
      const int incident = zeros == 2 ? 1 : (zeros == 1 ? 3 : 6);
      g.area[id] += A * incident / (3.0 * N * N);
    }
    g.triangle_nodes[t] = ids;
    for (const auto& [p, q] : pairs) {
      const LatticePoint& a = pts[p];
      const LatticePoint& b = pts[q];
      // Pairs on a common side belong to the edge; its first triangle adds them.
      int side = -1;
      if (a.k == 0 && b.k == 0) side = 0;
      else if (a.i == 0 && b.i == 0) side = 1;
      else if (a.j == 0 && b.j == 0) side = 2;
      if (side >= 0 && c.edges[c.triangle_edges[t][side]].triangles.front() != t) continue;
      double w;
      if (side >= 0) {
        // Exact side fraction keeps shared-edge weights identical across triangles.
        const int steps = side == 0 ? std::abs(a.j - b.j) : (side == 1 ? std::abs(a.k - b.k) : std::abs(a.i - b.i));
        w = tr.len[side] * steps / N;
      } else {
        w = std::hypot(xy[p][0] - xy[q][0], xy[p][1] - xy[q][1]);
      }
      out[ids[p]].emplace_back(ids[q], w);
      out[ids[q]].emplace_back(ids[p], w);
    }
  }
  // Vertex and edge nodes use their first incident triangle as reference frame.
  for (int v = 0; v < nv; ++v) {
    if (c.vertex_triangles[v].empty()) continue;
    const int t = c.vertex_triangles[v].front();
    MeshNode& node = g.nodes[v];
    node.tri = t;
    for (int s = 0; s < 3; ++s) node.bary[s] = c.triangles[t].v[s] == v ? 1.0 : 0.0;
  }
  for (int e = 0; e < ne; ++e) {
    const int t = c.edges[e].triangles.front();
    const Triangle& tr = c.triangles[t];
    for (int k = 0; k < m; ++k) {
      MeshNode& node = g.nodes[nv + e * m + k];
      node.tri = t;
      const double f = double(k + 1) / N;  // fraction from edges[e].a
      for (int s = 0; s < 3; ++s)
        node.bary[s] = tr.v[s] == c.edges[e].a ? 1 - f : (tr.v[s] == c.edges[e].b ? f : 0.0);
    }
  }

  g.offsets.assign(g.nodes.size() + 1, 0);
  for (std::size_t u = 0; u < out.size(); ++u) {
    auto& lst = out[u];
    std::sort(lst.begin(), lst.end());
    g.offsets[u + 1] = g.offsets[u] + int(lst.size());
  }
  g.targets.resize(g.offsets.back());
  g.weights.resize(g.offsets.back());
  for (std::size_t u = 0; u < out.size(); ++u) {
    int o = g.offsets[u];
    for (const auto& [v, w] : out[u]) {
      g.targets[o] = v;
      g.weights[o] = w;
      ++o;
    }
  }

  if (c.has_embedding()) {
    g.position.resize(g.nodes.size());
    for (std::size_t id = 0; id < g.nodes.size(); ++id) {
      const MeshNode& node = g.nodes[id];
      const Triangle& tr = c.triangles[node.tri];
      Vec3 p{0, 0, 0};
      for (int s = 0; s < 3; ++s)
        for (int d = 0; d < 3; ++d) p[d] += node.bary[s] * c.embedding[tr.v[s]][d];
      g.position[id] = p;
    }
  }
  return g;
}

std::vector<double> dijkstra(const MeshGraph& g, int source) { return dijkstra(g, std::vector<int>{source}); }

std::vector<double> dijkstra(const MeshGraph& g, const std::vector<int>& sources) {
  std::vector<double> dist(g.size(), kInfDist);
  MinHeap heap;
  for (int s : sources) {
    dist[s] = 0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (int o = g.offsets[u]; o < g.offsets[u + 1]; ++o) {
      const int v = g.targets[o];
      const double nd = d + g.weights[o];
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<int> shortest_path(const MeshGraph& g, int s, int t) {
  std::vector<double> dist(g.size(), kInfDist);
  std::vector<int> parent(g.size(), -1);
  MinHeap heap;
  dist[s] = 0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == t) break;
    for (int o = g.offsets[u]; o < g.offsets[u + 1]; ++o) {
      const int v = g.targets[o];
      const double nd = d + g.weights[o];
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  if (dist[t] == kInfDist) return {};
  std::vector<int> path{t};
  while (path.back() != s) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

DijkstraWorkspace::DijkstraWorkspace(const MeshGraph& g) : g_(g), dist_(g.size(), kInfDist) {}

const std::vector<std::pair<int, double>>& DijkstraWorkspace::run(const std::vector<int>& sources, double limit) {
  for (int v : touched_) dist_[v] = kInfDist;
  touched_.clear();
  settled_.clear();
  MinHeap heap;
  for (int s : sources) {
    if (dist_[s] == 0) continue;
    dist_[s] = 0;
    touched_.push_back(s);
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist_[u]) continue;
    settled_.emplace_back(u, d);
    for (int o = g_.offsets[u]; o < g_.offsets[u + 1]; ++o) {
      const int v = g_.targets[o];
      const double nd = d + g_.weights[o];
      if (nd < dist_[v] && nd <= limit) {
        if (dist_[v] == kInfDist) touched_.push_back(v);
        dist_[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return settled_;
}

DistanceBounds intrinsic_distance(const MeshGraph& g, int x, int y) {
  if (x < 0 || y < 0 || std::size_t(x) >= g.size() || std::size_t(y) >= g.size())
    throw InputError("node out of range");
  const double up = dijkstra(g, x)[y];
  return {up, up / (1 + refinement_slack(g.m))};
}

DistanceBounds intrinsic_distance(const MetricComplex& c, int x, int y, int m) {
  return intrinsic_distance(mesh_graph(c, m), x, y);
}

std::vector<double> distance_rows(const MeshGraph& g, const std::vector<int>& sources,
                                  const std::vector<int>& targets) {
  std::vector<double> rows(sources.size() * targets.size());
  parallel_for(sources.size(), [&](std::size_t s) {
    const auto d = dijkstra(g, sources[s]);
    for (std::size_t t = 0; t < targets.size(); ++t) rows[s * targets.size() + t] = d[targets[t]];
  });
  return rows;
}

InclusionReport check_neighborhood_inclusion(const MetricComplex& c, const MeshGraph& g, Simplex A) {
  const auto SA = S_of(c, A);
  std::set<int> tris;
  for (const Simplex& s : SA)
    if (s.dim == 2) tris.insert(s.index);
  const auto Av = simplex_vertices(c, A);
  auto carrier_triangles = [&](const MeshNode& n) -> std::vector<int> {
    switch (n.kind) {
      case Carrier::Vertex: return c.vertex_triangles[n.index];
      case Carrier::Edge: return c.edges[n.index].triangles;
      default: return {n.index};
    }
  };
  auto in_A = [&](const MeshNode& n) {
    const auto verts = simplex_vertices(c, node_carrier(n));
    for (int v : verts)
      if (std::find(Av.begin(), Av.end(), v) == Av.end()) return false;
    return true;
  };
  std::vector<int> sources;
  for (std::size_t id = 0; id < g.size(); ++id)
    if (in_A(g.nodes[id])) sources.push_back(int(id));
  const auto dist = dijkstra(g, sources);
  InclusionReport rep;
  for (std::size_t id = 0; id < g.size(); ++id) {
    bool interior = true;
    for (int t : carrier_triangles(g.nodes[id]))
      if (!tris.count(t)) interior = false;
    if (!interior && dist[id] < rep.r) {
      rep.r = dist[id];
      rep.witness_node = int(id);
    }
  }
  const double diam = simplex_diameter(c, A);
  rep.ratio = diam > 0 ? rep.r / diam : kInfDist;
  return rep;
}

}  // namespace polyqs
