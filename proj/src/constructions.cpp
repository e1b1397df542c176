#include "polyqs/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "polyqs/errors.hpp"

namespace polyqs {

namespace {

double norm3(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
Vec3 sub3(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add3(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale3(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

TriangleComplexK triangle_complex(double d1, double d2, double d3) {
  for (double d : {d1, d2, d3})
    if (!std::isfinite(d) || d <= 0) throw InputError("side lengths must be positive");
  if (d1 > d2 + d3 || d2 > d1 + d3 || d3 > d1 + d2) throw InputError("side lengths violate the triangle inequality");
  // Work with d1 = 1 and rescale at the end.
  const double b = d2 / d1, c = d3 / d1;
  const double x = std::clamp((1 + c * c - b * b) / 2, -c, c);
  const double y = std::sqrt(std::max(0.0, c * c - x * x));
  const Vec3 A[3] = {{0, 0, 0}, {1, 0, 0}, {x, y, 0}};
  const Vec3 z{(1 + x) / 3, y / 3, 1};
  const double apex[3] = {norm3(sub3(A[0], z)) * d1, norm3(sub3(A[1], z)) * d1, norm3(sub3(A[2], z)) * d1};
  const double side[3] = {d1, d2, d3};
  std::vector<Triangle> ts;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    ts.push_back({{i, j, 3}, {side[i], apex[j], apex[i]}});
  }
  std::vector<Vec3> emb;
  for (const Vec3& a : A) emb.push_back(scale3(a, d1));
  emb.push_back(scale3(z, d1));
  TriangleComplexK K;
  K.complex = build_complex(index_ids(4), std::move(ts), std::move(emb));
  for (int i = 0; i < 3; ++i) K.boundary_edges[i] = K.complex.edge_index(i, (i + 1) % 3);
  K.ratio = std::max({d1, d2, d3}) / std::min({d1, d2, d3});
  return K;
}

Subdivision subdivide3(const MetricComplex& Z) {
  Subdivision S;
  const std::size_t nv = Z.vertex_count();
  S.original_vertices = nv;
  std::vector<std::string> ids = Z.vertices;
  std::vector<Vec3> emb = Z.embedding;
  std::vector<Triangle> ts;
  ts.reserve(3 * Z.triangles.size());
  for (std::size_t t = 0; t < Z.triangles.size(); ++t) {
    const Triangle& tr = Z.triangles[t];
    const int g = int(nv + t);
    S.barycenter.push_back(g);
    ids.push_back("b" + std::to_string(t));
    const auto P = planar_realization(tr);
    const Vec2 G{(P[0][0] + P[1][0] + P[2][0]) / 3, (P[0][1] + P[1][1] + P[2][1]) / 3};
    double dg[3];
    for (int i = 0; i < 3; ++i) dg[i] = std::hypot(P[i][0] - G[0], P[i][1] - G[1]);
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      ts.push_back({{tr.v[i], tr.v[j], g}, {tr.len[i], dg[j], dg[i]}});
    }
    if (!emb.empty()) {
      Vec3 c{0, 0, 0};
      for (int v : tr.v) c = add3(c, emb[v]);
      emb.push_back(scale3(c, 1.0 / 3));
    }
  }
  BuildOptions opts;
  opts.strict_manifold = false;
  S.complex = build_complex(std::move(ids), std::move(ts), std::move(emb), opts);
  return S;
}

AssembledY assemble_Y(const MetricComplex& Z, const Subdivision& Zp, const std::vector<double>& edge_lengths) {
  if (edge_lengths.size() != Z.edges.size()) throw InputError("edge_lengths must have one entry per edge of Z");
  if (Zp.complex.triangles.size() != 3 * Z.triangles.size()) throw InputError("Zp is not the subdivision of Z");
  std::vector<Triangle> ts(Zp.complex.triangles.size());
  for (std::size_t t = 0; t < Z.triangles.size(); ++t) {
    const auto& te = Z.triangle_edges[t];
    const TriangleComplexK K =
        triangle_complex(edge_lengths[te[0]], edge_lengths[te[1]], edge_lengths[te[2]]);
    for (int i = 0; i < 3; ++i) {
      Triangle tr = Zp.complex.triangles[3 * t + i];
      tr.len = K.complex.triangles[i].len;
      tr.len[0] = edge_lengths[te[i]];
      ts[3 * t + i] = tr;
    }
  }
  BuildOptions opts;
  opts.strict_manifold = false;
  AssembledY out;
  out.Y = build_complex(Zp.complex.vertices, std::move(ts), {}, opts);
  out.f.resize(Zp.complex.vertex_count());
  for (std::size_t v = 0; v < out.f.size(); ++v) out.f[v] = int(v);
  return out;
}

Snowsphere snowsphere(int n) {
  if (n < 0 || n > kSnowsphereMaxStage)
    throw InputError("snowsphere stage must be in [0, " + std::to_string(kSnowsphereMaxStage) + "]");
  Snowsphere S;
  std::vector<Vec3> pts;
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) pts.push_back({double(x), double(y), double(z)});
  auto id = [](int x, int y, int z) { return x + 2 * y + 4 * z; };
  // Cube faces, counterclockwise seen from outside.
  std::vector<std::array<int, 4>> quads = {
      {id(0, 0, 0), id(0, 1, 0), id(1, 1, 0), id(1, 0, 0)},  // z = 0
      {id(0, 0, 1), id(1, 0, 1), id(1, 1, 1), id(0, 1, 1)},  // z = 1
      {id(0, 0, 0), id(1, 0, 0), id(1, 0, 1), id(0, 0, 1)},  // y = 0
      {id(0, 1, 0), id(0, 1, 1), id(1, 1, 1), id(1, 1, 0)},  // y = 1
      {id(0, 0, 0), id(0, 0, 1), id(0, 1, 1), id(0, 1, 0)},  // x = 0
      {id(1, 0, 0), id(1, 1, 0), id(1, 1, 1), id(1, 0, 1)},  // x = 1
  };
  double side = 1;
  S.vertices_at_stage.push_back(pts.size());
  for (int stage = 1; stage <= n; ++stage) {
    std::map<std::pair<int, int>, std::array<int, 2>> edge_points;
    auto edge_pt = [&](int a, int b, int which) {
      // which = 1 or 2: point at which/3 of the way from a to b.
      const int lo = std::min(a, b), hi = std::max(a, b);
      auto it = edge_points.find({lo, hi});
      if (it == edge_points.end()) {
        std::array<int, 2> ids{};
        for (int k = 0; k < 2; ++k) {
          ids[k] = int(pts.size());
          pts.push_back(add3(pts[lo], scale3(sub3(pts[hi], pts[lo]), (k + 1) / 3.0)));
        }
        it = edge_points.emplace(std::make_pair(lo, hi), ids).first;
      }
      const int k = (a == lo) ? which - 1 : 2 - which;
      return it->second[k];
    };
    const double s = side / 3;
    std::vector<std::array<int, 4>> next;
    next.reserve(quads.size() * 13);
    for (const auto& q : quads) {
      int P[4][4];  // P[a][b] = c0 + a/3 (c1 - c0) + b/3 (c3 - c0)
      P[0][0] = q[0];
      P[3][0] = q[1];
      P[3][3] = q[2];
      P[0][3] = q[3];
      P[1][0] = edge_pt(q[0], q[1], 1);
      P[2][0] = edge_pt(q[0], q[1], 2);
      P[3][1] = edge_pt(q[1], q[2], 1);
      P[3][2] = edge_pt(q[1], q[2], 2);
      P[2][3] = edge_pt(q[3], q[2], 2);
      P[1][3] = edge_pt(q[3], q[2], 1);
      P[0][1] = edge_pt(q[0], q[3], 1);
      P[0][2] = edge_pt(q[0], q[3], 2);
      const Vec3 da = scale3(sub3(pts[q[1]], pts[q[0]]), 1.0 / 3);
      const Vec3 db = scale3(sub3(pts[q[3]], pts[q[0]]), 1.0 / 3);
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
          P[a][b] = int(pts.size());
          pts.push_back(add3(pts[q[0]], add3(scale3(da, a), scale3(db, b))));
        }
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (a != 1 || b != 1) next.push_back({P[a][b], P[a + 1][b], P[a + 1][b + 1], P[a][b + 1]});
      Vec3 nrm = cross3(da, db);
      nrm = scale3(nrm, s / norm3(nrm));
      const int m[4] = {P[1][1], P[2][1], P[2][2], P[1][2]};
      int top[4];
      for (int i = 0; i < 4; ++i) {
        top[i] = int(pts.size());
        pts.push_back(add3(pts[m[i]], nrm));
      }
      for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        next.push_back({m[i], m[j], top[j], top[i]});
      }
      next.push_back({top[0], top[1], top[2], top[3]});
    }
    quads = std::move(next);
    side = s;
    S.vertices_at_stage.push_back(pts.size());
  }
  const double diag = side * std::sqrt(2.0);
  std::vector<Triangle> ts;
  ts.reserve(2 * quads.size());
  for (const auto& q : quads) {
    ts.push_back({{q[0], q[1], q[2]}, {side, side, diag}});
    ts.push_back({{q[0], q[2], q[3]}, {diag, side, side}});
  }
  S.complex = build_complex(index_ids(pts.size()), std::move(ts), pts);
  S.squares = std::move(quads);
  S.side = side;
  S.stage = n;
  return S;
}

MetricComplex flat_grid(int n, double t) {
  if (n < 1 || !(t > 0)) throw InputError("flat_grid needs n >= 1 and t > 0");
  const double h = std::sqrt(3.0) / 2;
  std::vector<Vec3> pts;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) pts.push_back({(i + 0.5 * j) * t, j * h * t, 0});
  std::vector<Triangle> ts;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      ts.push_back({{id(i, j), id(i + 1, j), id(i, j + 1)}, {t, t, t}});
      ts.push_back({{id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}, {t, t, t}});
    }
  auto ids = index_ids(pts.size());
  return build_complex(std::move(ids), std::move(ts), std::move(pts));
}

MetricComplex rectangle_mesh(double w, double h, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(w > 0) || !(h > 0)) throw InputError("rectangle_mesh needs positive sizes");
  std::vector<Vec3> pts;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) pts.push_back({w * i / nx, h * j / ny, 0});
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return complex_from_embedding(std::move(pts), tris);
}

MetricComplex flat_torus(int n, double t) {
  if (n < 3 || !(t > 0)) throw InputError("flat_torus needs n >= 3 and t > 0");
  auto id = [n](int i, int j) { return ((j + n) % n) * n + ((i + n) % n); };
  std::vector<Triangle> ts;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      ts.push_back({{id(i, j), id(i + 1, j), id(i, j + 1)}, {t, t, t}});
      ts.push_back({{id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}, {t, t, t}});
    }
  return build_complex(index_ids(std::size_t(n) * n), std::move(ts));
}

MetricComplex annulus_disk(double r, double R, int segments, int rings) {
  if (!(r > 0) || !(R > r) || segments < 3 || rings < 1) throw InputError("annulus_disk needs 0 < r < R");
  std::vector<Vec3> pts{{0, 0, 0}};
  const double pi = std::acos(-1.0);
  for (int k = 0; k <= rings; ++k) {
    const double rho = r * std::pow(R / r, double(k) / rings);
    // Alternate rings are rotated by half a segment to keep triangles well shaped.
    const double shift = (k % 2) * pi / segments;
    for (int s = 0; s < segments; ++s) {
      const double a = 2 * pi * s / segments + shift;
      pts.push_back({rho * std::cos(a), rho * std::sin(a), 0});
    }
  }
  auto id = [segments](int k, int s) { return 1 + k * segments + ((s % segments) + segments) % segments; };
  std::vector<std::array<int, 3>> tris;
  for (int s = 0; s < segments; ++s) tris.push_back({0, id(0, s), id(0, s + 1)});
  for (int k = 0; k < rings; ++k)
    for (int s = 0; s < segments; ++s) {
      if (k % 2 == 0) {
        tris.push_back({id(k, s), id(k + 1, s), id(k, s + 1)});
        tris.push_back({id(k, s + 1), id(k + 1, s), id(k + 1, s + 1)});
      } else {
        tris.push_back({id(k, s), id(k + 1, s + 1), id(k, s + 1)});
        tris.push_back({id(k, s), id(k + 1, s), id(k + 1, s + 1)});
      }
    }
  return complex_from_embedding(std::move(pts), tris);
}

}  // namespace polyqs
