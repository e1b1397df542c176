#include "polyqs/approximation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "polyqs/calibration.hpp"
#include "polyqs/errors.hpp"
#include "polyqs/parallel.hpp"

namespace polyqs {

namespace {

std::atomic<std::uint64_t> next_host_id{1};

// Largest integer k with k < K.
int below(double K) { return int(std::ceil(K)) - 1; }

// Breadth-first search with reusable scratch; stops early once every target is found.
class Bfs {
public:
  explicit Bfs(const Adjacency& adj) : adj_(adj), depth_(adj.size(), kUnreachable) {}

  void run(int src, int limit, const std::vector<int>& targets = {}) {
    for (int v : touched_) depth_[v] = kUnreachable;
    touched_.clear();
    std::size_t want = 0;
    for (int t : targets) want += (t == src) ? 0 : 1;
    depth_[src] = 0;
    touched_.push_back(src);
    std::size_t found = 0;
    std::vector<char> is_target;
    if (!targets.empty()) {
      is_target.assign(adj_.size(), 0);
      for (int t : targets) is_target[t] = 1;
      is_target[src] = 0;
    }
    for (std::size_t head = 0; head < touched_.size(); ++head) {
      if (!targets.empty() && found >= want) break;
      const int u = touched_[head];
      if (depth_[u] >= limit) continue;
      for (int w : adj_[u]) {
        if (depth_[w] != kUnreachable) continue;
        depth_[w] = depth_[u] + 1;
        touched_.push_back(w);
        if (!targets.empty() && is_target[w]) {
          is_target[w] = 0;
          ++found;
        }
      }
    }
  }
  int depth(int v) const { return depth_[v]; }

private:
  const Adjacency& adj_;
  std::vector<int> depth_;
  std::vector<int> touched_;
};

std::vector<int> bfs_path(const Adjacency& adj, int s, int t) {
  std::vector<int> parent(adj.size(), -1);
  std::vector<int> queue{s};
  parent[s] = s;
  for (std::size_t h = 0; h < queue.size() && parent[t] < 0; ++h)
    for (int w : adj[queue[h]])
      if (parent[w] < 0) {
        parent[w] = queue[h];
        queue.push_back(w);
      }
  if (parent[t] < 0) return {};
  std::vector<int> path{t};
  while (path.back() != s) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Per-item outcome folded into an AxiomResult in index order.
struct Slot {
  bool ok = true;
  double worst = 0;
  std::vector<int> witness;
};

void fold(AxiomResult& out, const std::vector<Slot>& slots, const std::string& what) {
  for (const Slot& s : slots) {
    out.worst = std::max(out.worst, s.worst);
    if (!s.ok && out.pass) {
      out.pass = false;
      out.witness = s.witness;
    }
  }
  if (!out.pass) out.detail = what;
}

void fail(Slot& s, std::vector<int> witness) {
  if (s.ok) s.witness = std::move(witness);
  s.ok = false;
}

std::vector<std::vector<int>> owners_of(const Approximation& a, std::size_t host_size) {
  std::vector<std::vector<int>> owners(host_size);
  for (std::size_t v = 0; v < a.vertex_count(); ++v)
    for (int x : a.U[v]) owners[x].push_back(int(v));
  return owners;
}

void validate(const Approximation& a, const MetricHost& host) {
  const std::size_t n = a.vertex_count();
  if (a.adjacency.size() != n || a.r.size() != n || a.U.size() != n)
    throw InputError("approximation arrays have inconsistent sizes");
  for (std::size_t v = 0; v < n; ++v) {
    if (a.p[v] < 0 || std::size_t(a.p[v]) >= host.size()) throw InputError("center out of range");
    if (!(a.r[v] > 0) || !std::isfinite(a.r[v])) throw InputError("radius must be positive and finite");
    for (int x : a.U[v])
      if (x < 0 || std::size_t(x) >= host.size()) throw InputError("cover point out of range");
    for (int w : a.adjacency[v])
      if (w < 0 || std::size_t(w) >= n || w == int(v)) throw InputError("bad adjacency entry");
  }
}

std::vector<double> full_row(const MetricHost& host, int src) {
  std::vector<double> row(host.size(), kInfDist);
  for (auto [x, d] : host.ball({src}, kInfDist)) row[x] = d;
  return row;
}

}  // namespace

std::vector<std::pair<int, double>> MatrixHost::ball(const std::vector<int>& sources, double limit) const {
  std::vector<std::pair<int, double>> out;
  const std::size_t n = m_.size();
  for (std::size_t x = 0; x < n; ++x) {
    double d = kInfDist;
    for (int s : sources) d = std::min(d, m_(s, x));
    if (d <= limit) out.emplace_back(int(x), d);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

MeshHost::MeshHost(const MeshGraph& g) : g_(g), id_(next_host_id++) {}

namespace {

// One workspace per thread, rebuilt when a different host asks for it.
DijkstraWorkspace& workspace_for(const MeshGraph& g, std::uint64_t id) {
  thread_local std::uint64_t owner = 0;
  thread_local std::unique_ptr<DijkstraWorkspace> ws;
  if (owner != id || !ws) {
    ws = std::make_unique<DijkstraWorkspace>(g);
    owner = id;
  }
  return *ws;
}

}  // namespace

std::vector<std::pair<int, double>> MeshHost::ball(const std::vector<int>& sources, double limit) const {
  return workspace_for(g_, id_).run(sources, limit);
}

double MeshHost::distance(int x, int y) const {
  auto& ws = workspace_for(g_, id_);
  ws.run({x}, kInfDist);
  return ws.distance(y);
}

int comb_distance(const Approximation& a, int u, int v) {
  Bfs bfs(a.adjacency);
  bfs.run(u, kUnreachable, {v});
  return bfs.depth(v);
}

std::vector<int> comb_distances(const Approximation& a, int v, int limit) {
  Bfs bfs(a.adjacency);
  bfs.run(v, limit);
  std::vector<int> out(a.vertex_count());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = bfs.depth(int(u));
  return out;
}

std::vector<int> star(const Approximation& a, int v, double K) {
  const auto k = comb_distances(a, v, below(K));
  std::vector<int> out;
  for (std::size_t u = 0; u < k.size(); ++u)
    if (k[u] < K) out.insert(out.end(), a.U[u].begin(), a.U[u].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool AxiomReport::axioms_pass() const {
  return A1.pass && A2_ball.pass && A2_cover.pass && A3_adjacent.pass && A3_converse.pass && A4.pass;
}

bool AxiomReport::pass() const { return axioms_pass() && fine.pass && A6.pass && A7.pass; }

AxiomReport check_axioms(const Approximation& a, const MetricHost& host, double K, double L,
                         const AxiomOptions& opts) {
  validate(a, host);
  if (!(K >= 1) || !(L > 0)) throw InputError("K must be at least 1 and L positive");
  const std::size_t n = a.vertex_count();
  const double tol = opts.tol;
  AxiomReport rep;
  rep.K = K;
  rep.L = L;
  const auto owners = owners_of(a, host.size());

  {  // (A1) valence
    std::vector<Slot> s(n);
    for (std::size_t v = 0; v < n; ++v) {
      s[v].worst = double(a.adjacency[v].size());
      if (s[v].worst > K) fail(s[v], {int(v)});
    }
    fold(rep.A1, s, "vertex whose valence exceeds K");
  }

  {  // (A2) ball and cover; fineness
    std::vector<Slot> ball(n), cover(n), fine(n);
    parallel_for(n, [&](std::size_t v) {
      const double r = a.r[v];
      const auto reached = host.ball({a.p[v]}, L * r * (1 + tol) + tol);
      const auto& U = a.U[v];
      std::vector<double> d_of(U.size(), kInfDist);
      for (auto [x, d] : reached) {
        auto it = std::lower_bound(U.begin(), U.end(), x);
        const bool inside = it != U.end() && *it == x;
        if (inside) d_of[it - U.begin()] = d;
        if (in_ball(d, r) && !inside) fail(ball[v], {int(v), x});
      }
      for (std::size_t i = 0; i < U.size(); ++i) {
        cover[v].worst = std::max(cover[v].worst, d_of[i] / r);
        if (d_of[i] == kInfDist) fail(cover[v], {int(v), U[i]});
      }
      if (U.size() >= host.size()) fail(fine[v], {int(v)});
      fine[v].worst = double(U.size()) / double(host.size());
    });
    fold(rep.A2_ball, ball, "point of B(p_v, r_v) outside U_v: (v, x)");
    fold(rep.A2_cover, cover, "point of U_v beyond L r_v from p_v: (v, x)");
    fold(rep.fine, fine, "U_v covers every sample point");
  }

  {  // (A3) adjacent pairs
    std::vector<Slot> s(n);
    for (std::size_t v = 0; v < n; ++v)
      for (int u : a.adjacency[v]) {
        if (u < int(v)) continue;
        const double ratio = std::max(a.r[u] / a.r[v], a.r[v] / a.r[u]);
        s[v].worst = std::max(s[v].worst, ratio);
        std::vector<int> common;
        std::set_intersection(a.U[u].begin(), a.U[u].end(), a.U[v].begin(), a.U[v].end(),
                              std::back_inserter(common));
        if (common.empty() || ratio > L * (1 + tol)) fail(s[v], {int(v), u});
      }
    fold(rep.A3_adjacent, s, "adjacent pair with disjoint sets or radius ratio above L: (v, u)");
  }

  {  // (A3) converse: overlapping sets are within K - 1 steps
    std::vector<std::vector<int>> partners(n);
    for (const auto& own : owners)
      for (std::size_t i = 0; i < own.size(); ++i)
        for (std::size_t j = 0; j < own.size(); ++j)
          if (own[i] < own[j]) partners[own[i]].push_back(own[j]);
    for (auto& p : partners) {
      std::sort(p.begin(), p.end());
      p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    std::vector<Slot> s(n);
    parallel_for(n, [&](std::size_t u) {
      if (partners[u].empty()) return;
      Bfs bfs(a.adjacency);
      bfs.run(int(u), below(K), partners[u]);
      for (int w : partners[u]) {
        const int k = bfs.depth(w);
        s[u].worst = std::max(s[u].worst, k == kUnreachable ? kInfDist : double(k));
        if (k == kUnreachable) fail(s[u], {int(u), w});
      }
    });
    fold(rep.A3_converse, s, "overlapping sets at combinatorial distance >= K: (u, w)");
  }

  {  // (A4) and (A6) share the neighborhood N(U_v, r_v / L)
    std::vector<Slot> a4(n), a6(n);
    const int reach = opts.derived ? below(2 * K) : below(K);
    parallel_for(n, [&](std::size_t v) {
      const auto nb = host.ball(a.U[v], a.r[v] / L + tol);
      std::vector<int> targets;
      for (auto [x, d] : nb) targets.insert(targets.end(), owners[x].begin(), owners[x].end());
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      Bfs bfs(a.adjacency);
      bfs.run(int(v), reach, targets);
      for (auto [x, d] : nb) {
        int kmin = kUnreachable, kmax = 0;
        for (int w : owners[x]) {
          kmin = std::min(kmin, bfs.depth(w));
          kmax = std::max(kmax, bfs.depth(w));
        }
        if (!(kmin < K)) fail(a4[v], {int(v), x});
        if (opts.derived) {
          a6[v].worst = std::max(a6[v].worst, kmax == kUnreachable ? kInfDist : double(kmax));
          if (!(kmax < 2 * K)) fail(a6[v], {int(v), x});
        }
      }
    });
    fold(rep.A4, a4, "point of N(U_v, r_v / L) outside st_K(v): (v, x)");
    if (opts.derived) fold(rep.A6, a6, "point near U_v owned by a vertex at distance >= 2K: (v, x)");
  }

  if (opts.derived && n > 0) {  // (A7) comparability on sampled far pairs
    const double C = 2 * L * L + 1;
    const int samples = std::min<int>(opts.a7_sources, int(n));
    std::vector<Slot> s(samples);
    parallel_for(std::size_t(samples), [&](std::size_t i) {
      const std::uint64_t h = splitmix64(opts.seed * 0x100000001b3ULL + i);
      const int u = samples == int(n) ? int(i) : int(h % n);
      if (a.U[u].empty()) return;
      const int x = a.U[u][splitmix64(h) % a.U[u].size()];
      const auto dp = full_row(host, a.p[u]);
      const auto dx = full_row(host, x);
      const auto k = comb_distances(a, u);
      for (std::size_t v = 0; v < n; ++v) {
        if (k[v] == kUnreachable || k[v] < 2 * K) continue;
        const double D = dp[a.p[v]];
        for (int y : a.U[v]) {
          const double d = dx[y];
          const double ratio = std::max(d / D, D / d);
          s[i].worst = std::max(s[i].worst, ratio);
          if (!(ratio <= C * (1 + tol))) fail(s[i], {u, int(v), x, y});
        }
      }
    });
    fold(rep.A7, s, "far pair outside the comparability band: (u, v, x, y)");
  }
  return rep;
}

double tight_L(const Approximation& a, const MetricHost& host) {
  validate(a, host);
  const std::size_t n = a.vertex_count();
  std::vector<double> worst(n, 1.0);
  parallel_for(n, [&](std::size_t v) {
    const auto& U = a.U[v];
    double limit = 2 * a.r[v];
    for (;;) {
      const auto reached = host.ball({a.p[v]}, limit);
      std::size_t hit = 0;
      double far = 0;
      for (auto [x, d] : reached)
        if (std::binary_search(U.begin(), U.end(), x)) {
          ++hit;
          far = std::max(far, d);
        }
      if (hit == U.size() || reached.size() == host.size()) {
        worst[v] = std::max(worst[v], hit == U.size() ? far / a.r[v] : kInfDist);
        break;
      }
      limit *= 2;
    }
    for (int u : a.adjacency[v]) worst[v] = std::max(worst[v], a.r[u] / a.r[v]);
  });
  return n ? *std::max_element(worst.begin(), worst.end()) : 1.0;
}

Approximation skeleton_approximation(const MetricComplex& c, const MeshGraph& g) {
  const std::size_t n = c.vertex_count();
  Approximation a;
  a.adjacency = c.vertex_adjacency();
  a.p.resize(n);
  std::iota(a.p.begin(), a.p.end(), 0);
  a.r.resize(n);
  a.U.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    a.r[v] = epsilon_x(c, int(v));
    auto& U = a.U[v];
    for (int t : c.vertex_triangles[v]) U.insert(U.end(), g.triangle_nodes[t].begin(), g.triangle_nodes[t].end());
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());
  }
  return a;
}

Approximation restrict_to_vertices(const Approximation& a, std::size_t vertex_count) {
  Approximation out = a;
  for (auto& U : out.U) U.erase(std::remove_if(U.begin(), U.end(), [&](int x) { return x >= int(vertex_count); }), U.end());
  return out;
}

CertifiedConstants certified_constants(const QCCertificate& cert) {
  CertifiedConstants k;
  k.K = std::max(3.0, std::ceil(cert.M));
  k.L = calibration::skeleton_L(std::max(cert.M2, cert.M3));
  return k;
}

Approximation image_approximation(const Approximation& a, const MetricHost& src, const PointMap& f,
                                  const MetricHost& dst) {
  validate(a, src);
  if (f.size() != src.size()) throw InputError("point map size does not match the source sample");
  for (int y : f)
    if (y < 0 || std::size_t(y) >= dst.size()) throw InputError("point map value out of range");
  const std::size_t n = a.vertex_count();
  Approximation out;
  out.adjacency = a.adjacency;
  out.p.resize(n);
  out.r.assign(n, kInfDist);
  out.U.resize(n);
  std::vector<int> empty_star(n, 0);
  parallel_for(n, [&](std::size_t v) {
    out.p[v] = f[a.p[v]];
    for (int x : a.U[v]) out.U[v].push_back(f[x]);
    std::sort(out.U[v].begin(), out.U[v].end());
    out.U[v].erase(std::unique(out.U[v].begin(), out.U[v].end()), out.U[v].end());
    const auto ds = full_row(src, a.p[v]);
    const auto dd = full_row(dst, out.p[v]);
    for (std::size_t x = 0; x < src.size(); ++x)
      if (ds[x] != kInfDist && ds[x] >= a.r[v] - kMetricTol) out.r[v] = std::min(out.r[v], dd[f[x]]);
    if (!(out.r[v] > 0) || out.r[v] == kInfDist) empty_star[v] = 1;
  });
  for (std::size_t v = 0; v < n; ++v)
    if (empty_star[v])
      throw PreconditionError("image radius undefined at vertex " + std::to_string(v) +
                              ": no sample point at distance >= r_v, or it maps onto p_v");
  return out;
}

namespace {

// Vertex of the node's triangle with the largest barycentric weight whose set
// contains the node; ties keep the current owner.
int owner_of(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int node, int current) {
  const MeshNode& mn = g.nodes[node];
  int best = -1;
  double bw = -1;
  for (int i = 0; i < 3; ++i) {
    const int w = c.triangles[mn.tri].v[i];
    if (!std::binary_search(a.U[w].begin(), a.U[w].end(), node)) continue;
    const double wt = mn.bary[i];
    if (wt > bw + 1e-12 || (std::abs(wt - bw) <= 1e-12 && w == current)) {
      best = w;
      bw = wt;
    }
  }
  if (best < 0) throw PreconditionError("mesh node " + std::to_string(node) + " has no owning vertex");
  return best;
}

void check_skeleton_pair(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int u, int v) {
  if (a.vertex_count() != c.vertex_count() || a.U.size() != c.vertex_count())
    throw InputError("approximation does not match the complex");
  if (g.size() < c.vertex_count()) throw InputError("mesh graph does not match the complex");
  const int n = int(a.vertex_count());
  if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("vertex out of range");
}

}  // namespace

ChainReport chain_between(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int u, int v) {
  check_skeleton_pair(a, c, g, u, v);
  ChainReport rep;
  const auto path = shortest_path(g, a.p[u], a.p[v]);
  if (path.empty()) throw PreconditionError("no path between the two centers");
  int current = u;
  rep.chain.push_back(u);
  for (int node : path) {
    current = (node == a.p[v]) ? v : owner_of(a, c, g, node, current);
    if (current != rep.chain.back()) rep.chain.push_back(current);
  }
  if (rep.chain.back() != v) rep.chain.push_back(v);
  for (std::size_t i = 1; i < rep.chain.size(); ++i)
    rep.max_step = std::max(rep.max_step, comb_distance(a, rep.chain[i - 1], rep.chain[i]));
  MeshHost host(g);
  for (std::size_t i = 0; i < rep.chain.size(); ++i) {
    const auto row = full_row(host, a.p[rep.chain[i]]);
    if (i == 0) rep.dist = row[a.p[v]];
    for (std::size_t j = i + 1; j < rep.chain.size(); ++j) rep.diam = std::max(rep.diam, row[a.p[rep.chain[j]]]);
  }
  rep.ratio = rep.dist > 0 ? rep.diam / rep.dist : 1.0;
  return rep;
}

QuasiconvexReport quasiconvex_chain(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int u,
                                    int v, double K) {
  check_skeleton_pair(a, c, g, u, v);
  const int k = comb_distance(a, u, v);
  if (k == kUnreachable) throw PreconditionError("vertices are in different components");
  if (k < K) {
    std::ostringstream os;
    os << "quasiconvexity needs k(u, v) >= K; got k = " << k << ", K = " << K;
    throw PreconditionError(os.str());
  }
  const auto base = chain_between(a, c, g, u, v);
  QuasiconvexReport rep;
  rep.chain.push_back(base.chain.front());
  for (std::size_t i = 1; i < base.chain.size(); ++i) {
    const auto step = bfs_path(a.adjacency, rep.chain.back(), base.chain[i]);
    rep.chain.insert(rep.chain.end(), step.begin() + 1, step.end());
  }
  for (int w : rep.chain) rep.r_sum += a.r[w];
  rep.dist = base.dist;
  rep.ratio = rep.r_sum / rep.dist;
  return rep;
}

StarDistortion isomorphism_star_distortion(const MetricComplex& X, const MetricComplex& Y, int m, double Kstar,
                                           int samples, std::uint64_t seed) {
  if (X.vertex_count() != Y.vertex_count() || X.triangles.size() != Y.triangles.size())
    throw InputError("complexes differ in size");
  for (std::size_t t = 0; t < X.triangles.size(); ++t)
    if (X.triangles[t].v != Y.triangles[t].v) throw InputError("complexes differ combinatorially");
  const MeshGraph gX = mesh_graph(X, m), gY = mesh_graph(Y, m);
  const Adjacency adj = X.vertex_adjacency();
  const std::size_t n = X.vertex_count();
  const int count = std::min<int>(samples, int(n));
  std::vector<StarDistortion> per(count);
  parallel_for(std::size_t(count), [&](std::size_t i) {
    const int v = count == int(n) ? int(i) : int(splitmix64(seed * 0x100000001b3ULL + i) % n);
    Bfs bfs(adj);
    bfs.run(v, below(Kstar));
    std::vector<int> S;
    for (std::size_t w = 0; w < n; ++w)
      if (bfs.depth(int(w)) < Kstar) S.push_back(int(w));
    const double rX = epsilon_x(X, v), rY = epsilon_x(Y, v);
    const auto rows = [&](const MeshGraph& g) {
      DijkstraWorkspace ws(g);
      ws.run({v}, kInfDist);
      double R = 0;
      for (int s : S) R = std::max(R, ws.distance(s));
      std::vector<double> out(S.size() * S.size());
      for (std::size_t a = 0; a < S.size(); ++a) {
        ws.run({S[a]}, 2 * R * (1 + kMetricTol));
        for (std::size_t b = 0; b < S.size(); ++b) out[a * S.size() + b] = ws.distance(S[b]);
      }
      return out;
    };
    const auto dX = rows(gX), dY = rows(gY);
    StarDistortion& r = per[i];
    r.vertex = v;
    for (std::size_t a = 0; a < S.size(); ++a)
      for (std::size_t b = a + 1; b < S.size(); ++b) {
        const double x = dX[a * S.size() + b] / rX, y = dY[a * S.size() + b] / rY;
        const double f = std::max(x / y, y / x);
        if (f > r.factor) {
          r.factor = f;
          r.pair = {S[a], S[b]};
        }
      }
  });
  StarDistortion best;
  for (const auto& r : per)
    if (r.factor > best.factor || best.vertex < 0) best = r;
  return best;
}

}  // namespace polyqs
