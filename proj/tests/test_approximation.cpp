#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polyqs/approximation.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/errors.hpp"

using namespace polyqs;

namespace {

const double kSqrt3 = std::sqrt(3.0);

MetricComplex bumpy_grid(std::mt19937_64& rng, int n, double amp) {
  auto base = flat_grid(n, 1.0);
  std::uniform_real_distribution<double> h(-amp, amp);
  auto pts = base.embedding;
  for (auto& p : pts) p[2] = h(rng);
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : base.triangles) tris.push_back(t.v);
  return complex_from_embedding(pts, tris);
}

int interior_grid_vertex(int n) { return (n / 2) * (n + 1) + n / 2; }

// Vertex-sampled skeleton approximation with exact Euclidean distances for a
// flat grid: every oracle number comes from coordinates.
FiniteMetric grid_vertex_metric(const MetricComplex& c) {
  std::vector<std::vector<double>> pts;
  for (const auto& p : c.embedding) pts.push_back({p[0], p[1], p[2]});
  return oracle::euclidean(pts);
}

}  // namespace

TEST_CASE("hosts: balls agree with brute force") {
  std::mt19937_64 rng(3);
  auto M = oracle::euclidean(oracle::random_points(rng, 30, 2));
  MatrixHost h(M);
  const auto b = h.ball({3, 17}, 0.4);
  for (std::size_t x = 0; x < M.size(); ++x) {
    const double d = std::min(M(3, x), M(17, x));
    const bool in = std::any_of(b.begin(), b.end(), [&](auto& e) { return e.first == int(x); });
    CHECK(in == (d <= 0.4));
  }
  CHECK(std::is_sorted(b.begin(), b.end(), [](auto& a, auto& c) { return a.second < c.second; }));

  auto c = flat_grid(4, 1.0);
  auto g = mesh_graph(c, 2);
  MeshHost mh(g);
  const auto ref = dijkstra(g, 5);
  for (int y : {0, 7, 40, int(g.size()) - 1}) CHECK(mh.distance(5, y) == ref[y]);
  CHECK(mh.size() == g.size());
}

TEST_CASE("combinatorial distance and stars on a grid") {
  auto c = flat_grid(6, 1.0);
  auto g = mesh_graph(c, 0);
  auto a = skeleton_approximation(c, g);
  const int v = interior_grid_vertex(6);
  CHECK(comb_distance(a, v, v) == 0);
  CHECK(comb_distance(a, v, a.adjacency[v][0]) == 1);
  CHECK(comb_distance(a, 0, 48) == 12);  // corners of the long diagonal: no shortcut across cells
  // st_1(v) is U_v; st_2(v) is the closed star of the 1-ring.
  CHECK(star(a, v, 1) == a.U[v]);
  const auto s2 = star(a, v, 2);
  CHECK(s2.size() == 19);  // hexagon of radius 2: 1 + 6 + 12 vertices
  Approximation split = a;
  split.adjacency.assign(a.vertex_count(), {});
  CHECK(comb_distance(split, 0, 1) == kUnreachable);
}

TEST_CASE("skeleton approximation of the flat grid") {
  auto c = flat_grid(6, 1.0);
  auto g = mesh_graph(c, 2);
  MeshHost host(g);
  auto a = skeleton_approximation(c, g);
  const int v = interior_grid_vertex(6);
  CHECK(a.r[v] == doctest::Approx(kSqrt3 / 2).epsilon(1e-12));
  // v, 6 spokes and 6 link edges with 2 Steiner points each, 6 link vertices,
  // and one interior lattice point per face.
  CHECK(a.U[v].size() == 1 + 12 + 6 + 12 + 6);

  auto k = certified_constants(qc_certificate(c));
  CHECK(k.K == 13);
  CHECK(k.L == doctest::Approx(1.5));
  auto rep = check_axioms(a, host, k.K, k.L);
  CHECK(rep.pass());
  // The farthest point of the closed star is a link vertex at distance 1 = (2/sqrt 3) r.
  CHECK(tight_L(a, host) == doctest::Approx(2 / kSqrt3).epsilon(1e-12));
  CHECK(rep.A2_cover.worst == doctest::Approx(2 / kSqrt3).epsilon(1e-12));
}

TEST_CASE("half the certified L produces a cover witness") {
  auto c = snowsphere(1).complex;
  auto g = mesh_graph(c, 2);
  MeshHost host(g);
  auto a = skeleton_approximation(c, g);
  auto k = certified_constants(qc_certificate(c));
  CHECK(check_axioms(a, host, k.K, k.L).pass());
  auto rep = check_axioms(a, host, k.K, k.L / 2);
  CHECK_FALSE(rep.A2_cover.pass);
  REQUIRE(rep.A2_cover.witness.size() == 2);
  const int v = rep.A2_cover.witness[0], x = rep.A2_cover.witness[1];
  CHECK(std::binary_search(a.U[v].begin(), a.U[v].end(), x));
  CHECK(host.distance(v, x) > k.L / 2 * a.r[v]);
}

TEST_CASE("certified constants pass on random bumpy grids") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 12; ++it) {
    auto c = bumpy_grid(rng, 5, 0.1 + 0.05 * it);
    auto g = mesh_graph(c, 2);
    MeshHost host(g);
    auto a = skeleton_approximation(c, g);
    auto cert = qc_certificate(c);
    auto k = certified_constants(cert);
    AxiomOptions o;
    o.seed = it;
    auto rep = check_axioms(a, host, k.K, k.L, o);
    INFO("instance " << it);
    CHECK(rep.pass());
    CHECK(tight_L(a, host) <= k.L);
  }
}

TEST_CASE("tampered approximations are caught with witnesses") {
  auto c = flat_grid(6, 1.0);
  auto g = mesh_graph(c, 2);
  MeshHost host(g);
  const auto base = skeleton_approximation(c, g);
  const int v = interior_grid_vertex(6);

  auto a = base;  // drop v's own center from U_v
  a.U[v].erase(std::find(a.U[v].begin(), a.U[v].end(), v));
  auto rep = check_axioms(a, host, 13, 1.5);
  CHECK_FALSE(rep.A2_ball.pass);
  CHECK(rep.A2_ball.witness == std::vector<int>{v, v});

  a = base;  // radius jump between neighbours
  a.r[v] *= 3;
  rep = check_axioms(a, host, 13, 1.5);
  CHECK_FALSE(rep.A3_adjacent.pass);
  CHECK(rep.A3_adjacent.worst == doctest::Approx(3.0));

  a = base;  // valence
  rep = check_axioms(a, host, 5, 1.5);
  CHECK_FALSE(rep.A1.pass);

  a = base;  // overlap with a far vertex
  a.U[0].push_back(v);
  std::sort(a.U[0].begin(), a.U[0].end());
  rep = check_axioms(a, host, 3, 1.5);
  CHECK_FALSE(rep.A3_converse.pass);

  a = base;  // a point owned by nobody
  const int lonely = a.U[v].back();
  for (auto& U : a.U) U.erase(std::remove(U.begin(), U.end(), lonely), U.end());
  rep = check_axioms(a, host, 13, 1.5);
  CHECK_FALSE(rep.A4.pass);

  CHECK_THROWS_AS(check_axioms(base, host, 0.5, 1.5), InputError);
  a = base;
  a.r[0] = 0;
  CHECK_THROWS_AS(check_axioms(a, host, 13, 1.5), InputError);
}

TEST_CASE("a one-triangle complex is not fine") {
  auto c = build_complex(index_ids(3), {{{0, 1, 2}, {1, 1, 1}}});
  auto g = mesh_graph(c, 2);
  MeshHost host(g);
  auto rep = check_axioms(skeleton_approximation(c, g), host, 3, 1.5);
  CHECK_FALSE(rep.fine.pass);
}

TEST_CASE("image approximation against a brute-force radius") {
  auto c = flat_grid(5, 1.0);
  auto g = mesh_graph(c, 0);
  auto X = grid_vertex_metric(c);
  auto a = restrict_to_vertices(skeleton_approximation(c, g), c.vertex_count());
  MatrixHost hx(X);

  // Scaling by 2: radii become twice the nearest sample distance >= r_v.
  FiniteMetric Y = X;
  for (auto& d : Y.dist) d *= 2;
  MatrixHost hy(Y);
  const auto f = oracle::identity_map(X.size());
  auto b = image_approximation(a, hx, f, hy);
  for (std::size_t v = 0; v < a.vertex_count(); ++v) {
    double want = 1e300;
    for (std::size_t x = 0; x < X.size(); ++x)
      if (X(a.p[v], x) >= a.r[v]) want = std::min(want, Y(a.p[v], x));
    CHECK(b.r[v] == want);
    CHECK(b.U[v] == a.U[v]);
    CHECK(b.p[v] == a.p[v]);
  }
  // Grid vertices sit at distance 1 >= sqrt3/2, so r' = 2.
  CHECK(b.r[interior_grid_vertex(5)] == doctest::Approx(2.0).epsilon(1e-12));

  // A non-injective map onto one point leaves no admissible radius.
  PointMap collapse(X.size(), 0);
  FiniteMetric one(1);
  MatrixHost h1(one);
  CHECK_THROWS_AS(image_approximation(a, hx, collapse, h1), PreconditionError);
  PointMap short_map(3, 0);
  CHECK_THROWS_AS(image_approximation(a, hx, short_map, hy), InputError);
}

TEST_CASE("chains follow geodesics with unit steps") {
  auto c = snowsphere(1).complex;
  auto g = mesh_graph(c, 2);
  auto a = skeleton_approximation(c, g);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, int(c.vertex_count()) - 1);
  for (int it = 0; it < 20; ++it) {
    const int u = pick(rng), v = pick(rng);
    auto ch = chain_between(a, c, g, u, v);
    INFO("pair " << u << " " << v);
    CHECK(ch.chain.front() == u);
    CHECK(ch.chain.back() == v);
    CHECK(ch.max_step <= 1);
    if (u != v) {
      CHECK(ch.ratio >= 1.0 - 1e-12);
      CHECK(ch.ratio <= 2.0);
    }
  }
}

TEST_CASE("quasiconvex chains on the flat grid") {
  auto c = flat_grid(12, 1.0);
  auto g = mesh_graph(c, 2);
  auto a = skeleton_approximation(c, g);
  const int far = int(c.vertex_count()) - 1;
  CHECK_THROWS_AS(quasiconvex_chain(a, c, g, 0, 1, 3), PreconditionError);
  auto q = quasiconvex_chain(a, c, g, 0, far, 3);
  for (std::size_t i = 1; i < q.chain.size(); ++i) CHECK(comb_distance(a, q.chain[i - 1], q.chain[i]) == 1);
  // Corner to corner of the 12 x 12 rhombus: the long diagonal, 12 sqrt 3.
  CHECK(q.dist == doctest::Approx(12 * kSqrt3).epsilon(0.02));
  CHECK(q.ratio > 0);
  CHECK(q.ratio <= 2.0);
}

TEST_CASE("star distortion of an isomorphism") {
  auto X = flat_grid(6, 1.0);
  CHECK(isomorphism_star_distortion(X, flat_grid(6, 2.5), 1, 2, 10, 1).factor ==
        doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(4);
  auto Y = bumpy_grid(rng, 6, 0.3);
  auto d = isomorphism_star_distortion(X, Y, 1, 2, 49, 1);
  CHECK(d.factor > 1.0);
  CHECK(d.factor < 3.0);
  CHECK(d.pair.size() == 2);
  CHECK_THROWS_AS(isomorphism_star_distortion(X, flat_grid(5, 1.0), 1, 2, 4, 1), InputError);
}

TEST_CASE("K-stars are unions of closed vertex stars") {
  auto c = flat_grid(6, 1.0);
  auto g = mesh_graph(c, 2);
  auto a = skeleton_approximation(c, g);
  for (int v : {0, 6, interior_grid_vertex(6), 30}) {
    // Triangles of S(u) for k(u, v) < 3; a node belongs to the
    // union of closed stars when its carrier is a face of one of them.
    std::vector<std::vector<int>> tris;
    for (int u : vertex_k_star(c, v, 2))
      for (const Simplex& s : star_sets(c, u))
        if (s.dim == 2) tris.push_back(simplex_vertices(c, s));
    std::vector<int> want;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const auto face = simplex_vertices(c, node_carrier(g.nodes[x]));
      const bool in = std::any_of(tris.begin(), tris.end(), [&](const std::vector<int>& t) {
        return std::all_of(face.begin(), face.end(), [&](int w) { return std::find(t.begin(), t.end(), w) != t.end(); });
      });
      if (in) want.push_back(int(x));
    }
    INFO("vertex " << v);
    CHECK(star(a, v, 3) == want);
  }
}

TEST_CASE("chains between far grid vertices stay within three diameters") {
  auto c = flat_grid(10, 1.0);
  auto g = mesh_graph(c, 2);
  auto a = skeleton_approximation(c, g);
  const int n = 10, last = int(c.vertex_count()) - 1;
  for (auto [u, v] : std::vector<std::pair<int, int>>{{0, last}, {n, last - n}, {0, n}, {5, last - 5}}) {
    auto ch = chain_between(a, c, g, u, v);
    INFO("pair " << u << " " << v);
    CHECK(ch.max_step <= 1);
    CHECK(ch.ratio <= 3.0);
  }
  auto adj = chain_between(a, c, g, 0, a.adjacency[0][0]);
  CHECK(adj.chain == std::vector<int>{0, a.adjacency[0][0]});
  CHECK(adj.ratio == doctest::Approx(1.0));
}

TEST_CASE("chains on snowsphere stage 2 have bounded ratio") {
  auto c = snowsphere(2).complex;
  auto g = mesh_graph(c, 1);
  auto a = skeleton_approximation(c, g);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, int(c.vertex_count()) - 1);
  double worst = 1, worst_qc = 0;
  const auto K = certified_constants(qc_certificate(c)).K;
  for (int it = 0; it < 100; ++it) {
    const int u = pick(rng), v = pick(rng);
    if (u == v) continue;
    auto ch = chain_between(a, c, g, u, v);
    CHECK(ch.max_step <= 1);
    worst = std::max(worst, ch.ratio);
    if (comb_distance(a, u, v) >= K) worst_qc = std::max(worst_qc, quasiconvex_chain(a, c, g, u, v, K).ratio);
  }
  MESSAGE("snowsphere(2) chain ratio max " << worst << ", quasiconvex ratio max " << worst_qc);
  CHECK(worst <= 3.0);
  CHECK(worst_qc <= 4.0);
}

TEST_CASE("quasiconvex chain along a straight grid row") {
  const int n = 12;
  auto c = flat_grid(n, 1.0);
  auto g = mesh_graph(c, 2);
  auto a = skeleton_approximation(c, g);
  const int row = (n / 2) * (n + 1);
  auto q = quasiconvex_chain(a, c, g, row, row + n, 3);
  for (std::size_t i = 1; i < q.chain.size(); ++i) CHECK(comb_distance(a, q.chain[i - 1], q.chain[i]) == 1);
  CHECK(q.dist == doctest::Approx(double(n)).epsilon(1e-9));
  CHECK(q.r_sum == doctest::Approx(kSqrt3 / 2 * (n + 1)).epsilon(0.05));
  CHECK(q.ratio <= 2.0);
}

TEST_CASE("passing at (K, L) implies passing at larger constants") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 6; ++it) {
    auto c = bumpy_grid(rng, 5, 0.1 + 0.1 * it);
    auto g = mesh_graph(c, 2);
    MeshHost host(g);
    auto a = skeleton_approximation(c, g);
    const auto k = certified_constants(qc_certificate(c));
    REQUIRE(check_axioms(a, host, k.K, k.L).pass());
    std::uniform_real_distribution<double> grow(1.0, 2.0);
    for (int j = 0; j < 3; ++j) {
      const double K2 = std::ceil(k.K * grow(rng)), L2 = k.L * grow(rng);
      INFO("instance " << it << " K' " << K2 << " L' " << L2);
      CHECK(check_axioms(a, host, K2, L2).pass());
    }
  }
}

TEST_CASE("bi-Lipschitz images scale radii and keep the axioms at lambda^2 L") {
  auto c = flat_grid(6, 1.0);
  auto g = mesh_graph(c, 0);
  auto a = restrict_to_vertices(skeleton_approximation(c, g), c.vertex_count());
  auto X = grid_vertex_metric(c);
  MatrixHost hx(X);
  // Radii at sample resolution: the nearest sample at distance >= r_v, which is
  // what an image approximation measures.
  for (std::size_t v = 0; v < a.vertex_count(); ++v) {
    double snap = 1e300;
    for (std::size_t x = 0; x < X.size(); ++x)
      if (X(v, x) >= a.r[v]) snap = std::min(snap, X(v, x));
    a.r[v] = snap;
  }
  const double K = 13, L = tight_L(a, hx);
  REQUIRE(check_axioms(a, hx, K, L).pass());
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int it = 0; it < 10; ++it) {
    // Smooth shear-and-wobble of the plane with small derivative: bi-Lipschitz.
    const double s = 0.05 + 0.02 * it, ph = u(rng) * 3;
    std::vector<std::vector<double>> moved;
    for (const auto& p : c.embedding)
      moved.push_back({p[0] + s * std::sin(p[1] + ph), p[1] + s * std::cos(0.7 * p[0] - ph), 0.0});
    FiniteMetric Y = oracle::euclidean(moved);
    double lambda = 1;
    for (std::size_t x = 0; x < X.size(); ++x)
      for (std::size_t y = x + 1; y < X.size(); ++y)
        lambda = std::max({lambda, Y(x, y) / X(x, y), X(x, y) / Y(x, y)});
    MatrixHost hy(Y);
    auto b = image_approximation(a, hx, oracle::identity_map(X.size()), hy);
    INFO("instance " << it << " lambda " << lambda);
    for (std::size_t v = 0; v < a.vertex_count(); ++v) {
      CHECK(b.r[v] >= a.r[v] / lambda - 1e-12);
      CHECK(b.r[v] <= a.r[v] * lambda + 1e-12);
    }
    CHECK(check_axioms(b, hy, K, lambda * lambda * L).pass());
  }
}

TEST_CASE("snowsphere stage 2 passes with stage 1 constants") {
  const auto k = certified_constants(qc_certificate(snowsphere(1).complex));
  auto c = snowsphere(2).complex;
  auto g = mesh_graph(c, 1);
  MeshHost host(g);
  CHECK(check_axioms(skeleton_approximation(c, g), host, k.K, k.L).pass());
}

TEST_CASE("derived axioms hold whenever the basic axioms hold") {
  std::mt19937_64 rng(12);
  int basic = 0;
  for (int it = 0; it < 10; ++it) {
    auto c = bumpy_grid(rng, 4, 0.05 + 0.1 * it);
    auto g = mesh_graph(c, 2);
    MeshHost host(g);
    auto a = skeleton_approximation(c, g);
    for (double K : {3.0, 6.0, 13.0})
      for (double L : {1.0, 1.2, 1.5, 2.5}) {
        AxiomOptions o;
        o.seed = it;
        auto rep = check_axioms(a, host, K, L, o);
        if (!rep.axioms_pass()) continue;
        ++basic;
        INFO("instance " << it << " K " << K << " L " << L);
        CHECK(rep.A6.pass);
        CHECK(rep.A7.pass);
      }
  }
  CHECK(basic > 0);
}
