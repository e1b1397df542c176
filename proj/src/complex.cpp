#include "polyqs/complex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "polyqs/errors.hpp"

namespace polyqs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

double point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double len2 = ux * ux + uy * uy;
  double s = len2 > 0 ? ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + s * ux), p[1] - (a[1] + s * uy));
}

// Triangle with vertex order rotated so that vertex `k` comes first.
Triangle rotated(const Triangle& t, int k) {
  Triangle r;
  for (int i = 0; i < 3; ++i) {
    r.v[i] = t.v[(i + k) % 3];
    r.len[i] = t.len[(i + k) % 3];
  }
  return r;
}

}  // namespace

std::vector<std::string> index_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

int MetricComplex::edge_index(int a, int b) const {
  auto it = edge_lookup.find(edge_key(a, b));
  return it == edge_lookup.end() ? -1 : it->second;
}

std::vector<std::vector<int>> MetricComplex::vertex_adjacency() const {
  std::vector<std::vector<int>> adj(vertices.size());
  for (const Edge& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

MetricComplex build_complex(std::vector<std::string> ids, std::vector<Triangle> triangles,
                            std::vector<Vec3> embedding, BuildOptions opts) {
  MetricComplex c;
  c.vertices = std::move(ids);
  c.triangles = std::move(triangles);
  c.embedding = std::move(embedding);
  const int nv = int(c.vertices.size());
  if (!c.embedding.empty() && int(c.embedding.size()) != nv)
    throw InputError("embedding size does not match vertex count");

  c.vertex_triangles.assign(nv, {});
  c.vertex_edges.assign(nv, {});
  c.triangle_edges.resize(c.triangles.size());
  for (std::size_t ti = 0; ti < c.triangles.size(); ++ti) {
    const Triangle& t = c.triangles[ti];
    for (int i = 0; i < 3; ++i) {
      if (t.v[i] < 0 || t.v[i] >= nv) throw InputError("triangle " + std::to_string(ti) + " has a bad vertex index");
      if (!std::isfinite(t.len[i]) || t.len[i] <= 0)
        throw InputError("triangle " + std::to_string(ti) + " has a nonpositive side length");
    }
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
      throw InputError("triangle " + std::to_string(ti) + " repeats a vertex");
    const double a = t.len[0], b = t.len[1], d = t.len[2];
    const double margin = 1e-12 * (a + b + d);
    if (a + b - d <= margin || b + d - a <= margin || d + a - b <= margin)
      throw InputError("triangle " + std::to_string(ti) + " is degenerate");
    for (int i = 0; i < 3; ++i) {
      const int u = t.v[i], w = t.v[(i + 1) % 3];
      const std::uint64_t key = edge_key(u, w);
      auto it = c.edge_lookup.find(key);
      int ei;
      if (it == c.edge_lookup.end()) {
        ei = int(c.edges.size());
        c.edge_lookup.emplace(key, ei);
        c.edges.push_back({std::min(u, w), std::max(u, w), t.len[i], {}});
        c.vertex_edges[u].push_back(ei);
        c.vertex_edges[w].push_back(ei);
      } else {
        ei = it->second;
        const double l = c.edges[ei].length;
        if (std::abs(l - t.len[i]) > opts.length_tol * std::max(1.0, l))
          throw InputError("inconsistent length on shared edge (" + std::to_string(u) + ", " +
                           std::to_string(w) + ")");
      }
      c.edges[ei].triangles.push_back(int(ti));
      c.triangle_edges[ti][i] = ei;
      c.vertex_triangles[u].push_back(int(ti));
    }
  }
  if (opts.strict_manifold) {
    for (const Edge& e : c.edges)
      if (e.triangles.size() > 2)
        throw InputError("non-manifold edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
  }
  return c;
}

MetricComplex complex_from_embedding(std::vector<Vec3> coords, const std::vector<std::array<int, 3>>& tris,
                                     BuildOptions opts) {
  auto d = [&](int a, int b) {
    return std::sqrt((coords[a][0] - coords[b][0]) * (coords[a][0] - coords[b][0]) +
                     (coords[a][1] - coords[b][1]) * (coords[a][1] - coords[b][1]) +
                     (coords[a][2] - coords[b][2]) * (coords[a][2] - coords[b][2]));
  };
  std::vector<Triangle> ts;
  ts.reserve(tris.size());
  for (const auto& v : tris) {
    for (int i : v)
      if (i < 0 || std::size_t(i) >= coords.size()) throw InputError("triangle vertex out of range");
    ts.push_back({v, {d(v[0], v[1]), d(v[1], v[2]), d(v[2], v[0])}});
  }
  const std::size_t n = coords.size();
  return build_complex(index_ids(n), std::move(ts), std::move(coords), opts);
}

std::array<Vec2, 3> planar_realization(const Triangle& t) {
  const double a = t.len[0], b = t.len[1], d = t.len[2];
  // Angle at v0 between sides of length a (to v1) and d (to v2).
  const double cosv = std::clamp((a * a + d * d - b * b) / (2 * a * d), -1.0, 1.0);
  const double sinv = std::sqrt(std::max(0.0, 1 - cosv * cosv));
  return {Vec2{0, 0}, Vec2{a, 0}, Vec2{d * cosv, d * sinv}};
}

double triangle_area(const Triangle& t) {
  const auto p = planar_realization(t);
  return 0.5 * std::abs(p[1][0] * p[2][1] - p[1][1] * p[2][0]);
}

double triangle_diameter(const Triangle& t) { return std::max({t.len[0], t.len[1], t.len[2]}); }

double min_angle(const Triangle& t) {
  double best = kInf;
  for (int k = 0; k < 3; ++k) {
    const Triangle r = rotated(t, k);
    const double a = r.len[0], b = r.len[1], d = r.len[2];
    best = std::min(best, std::acos(std::clamp((a * a + d * d - b * b) / (2 * a * d), -1.0, 1.0)));
  }
  return best;
}

bool consistently_oriented(const MetricComplex& c) {
  for (const Edge& e : c.edges) {
    if (e.triangles.size() != 2) continue;
    int dir[2];
    for (int k = 0; k < 2; ++k) {
      const Triangle& t = c.triangles[e.triangles[k]];
      for (int i = 0; i < 3; ++i) {
        if (t.v[i] == e.a && t.v[(i + 1) % 3] == e.b) dir[k] = 1;
        if (t.v[i] == e.b && t.v[(i + 1) % 3] == e.a) dir[k] = -1;
      }
    }
    if (dir[0] == dir[1]) return false;
  }
  return true;
}

double epsilon_x(const MetricComplex& c, int x) {
  if (x < 0 || std::size_t(x) >= c.vertex_count()) throw InputError("vertex out of range");
  if (c.vertex_triangles[x].empty()) throw InputError("vertex " + std::to_string(x) + " is isolated");
  double eps = kInf;
  for (int ti : c.vertex_triangles[x]) {
    const Triangle& t = c.triangles[ti];
    int k = 0;
    while (t.v[k] != x) ++k;
    const auto p = planar_realization(rotated(t, k));
    eps = std::min(eps, point_segment(p[0], p[1], p[2]));
  }
  for (int ei : c.vertex_edges[x]) eps = std::min(eps, c.edges[ei].length);
  return eps;
}

double shape_constant(const Triangle& t) {
  const auto p = planar_realization(t);
  // A maps P1 -> (1,0), P2 -> (1/2, sqrt3/2); A = Q P^{-1}.
  const double p11 = p[1][0], p21 = p[1][1], p12 = p[2][0], p22 = p[2][1];
  const double det = p11 * p22 - p12 * p21;
  const double i11 = p22 / det, i12 = -p12 / det, i21 = -p21 / det, i22 = p11 / det;
  const double q11 = 1, q12 = 0.5, q21 = 0, q22 = std::sqrt(3.0) / 2;
  const double diam = triangle_diameter(t);
  const double a = diam * (q11 * i11 + q12 * i21), b = diam * (q11 * i12 + q12 * i22);
  const double cc = diam * (q21 * i11 + q22 * i21), d = diam * (q21 * i12 + q22 * i22);
  // Singular values of [[a,b],[cc,d]].
  const double s1 = a * a + b * b + cc * cc + d * d;
  const double dt = std::abs(a * d - b * cc);
  const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4 * dt * dt));
  const double smax = std::sqrt((s1 + disc) / 2);
  const double smin = dt / smax;
  return std::max(smax, 1.0 / smin);
}

QCCertificate qc_certificate(const MetricComplex& c) {
  QCCertificate q;
  for (std::size_t x = 0; x < c.vertex_count(); ++x) {
    const double count = double(c.vertex_triangles[x].size() + c.vertex_edges[x].size() + 1);
    if (count > q.M1) {
      q.M1 = count;
      q.M1_vertex = int(x);
    }
    double lo = kInf, hi = 0;
    for (int ti : c.vertex_triangles[x]) {
      const double d = triangle_diameter(c.triangles[ti]);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (hi > 0 && hi / lo > q.M3) {
      q.M3 = hi / lo;
      q.M3_vertex = int(x);
    }
  }
  for (std::size_t ti = 0; ti < c.triangles.size(); ++ti) {
    const double s = shape_constant(c.triangles[ti]);
    if (s > q.M2) {
      q.M2 = s;
      q.M2_triangle = int(ti);
    }
  }
  q.M = std::max({q.M1, q.M2, q.M3});
  return q;
}

std::vector<int> simplex_vertices(const MetricComplex& c, Simplex s) {
  switch (s.dim) {
    case 0: return {s.index};
    case 1: return {c.edges.at(s.index).a, c.edges.at(s.index).b};
    case 2: {
      const auto& v = c.triangles.at(s.index).v;
      return {v[0], v[1], v[2]};
    }
    default: throw InputError("simplex dimension must be 0, 1 or 2");
  }
}

double simplex_diameter(const MetricComplex& c, Simplex s) {
  switch (s.dim) {
    case 0: return 0.0;
    case 1: return c.edges.at(s.index).length;
    case 2: return triangle_diameter(c.triangles.at(s.index));
    default: throw InputError("simplex dimension must be 0, 1 or 2");
  }
}

std::vector<Simplex> star_sets(const MetricComplex& c, int x) {
  std::vector<Simplex> out{{0, x}};
  for (int e : c.vertex_edges.at(x)) out.push_back({1, e});
  for (int t : c.vertex_triangles.at(x)) out.push_back({2, t});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Simplex> S_of(const MetricComplex& c, Simplex A) {
  // Closed simplices meet A exactly when they share a vertex with it.
  std::set<Simplex> out;
  for (int v : simplex_vertices(c, A)) {
    out.insert({0, v});
    for (int e : c.vertex_edges[v]) out.insert({1, e});
    for (int t : c.vertex_triangles[v]) out.insert({2, t});
  }
  return {out.begin(), out.end()};
}

std::vector<int> vertex_k_star(const MetricComplex& c, int v, int K) {
  const auto adj = c.vertex_adjacency();
  std::vector<int> depth(c.vertex_count(), -1);
  std::deque<int> q{v};
  depth[v] = 0;
  std::vector<int> out;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    out.push_back(u);
    if (depth[u] >= K) continue;
    for (int w : adj[u])
      if (depth[w] < 0) {
        depth[w] = depth[u] + 1;
        q.push_back(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

MetricComplex with_uniform_lengths(const MetricComplex& c, double t) {
  std::vector<Triangle> ts = c.triangles;
  for (auto& tr : ts) tr.len = {t, t, t};
  BuildOptions opts;
  opts.strict_manifold = false;
  return build_complex(c.vertices, std::move(ts), {}, opts);
}

}  // namespace polyqs
