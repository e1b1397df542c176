#include "polyqs/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

#include "polyqs/errors.hpp"
#include "polyqs/parallel.hpp"

namespace polyqs {

namespace {

using HeapItem = std::pair<double, int>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

// Tie-break between equal rho-costs by Euclidean length, so that zero-density
// regions produce short paths rather than arbitrary ones.
constexpr double kTieBreak = 1e-12;

struct Constraint {
  std::vector<std::pair<int, double>> coef;  // node, coefficient (sum of half edge lengths)
  double q = 0;                              // sum coef^2 / (2 w)
  double lambda = 0;
  std::vector<int> path;
};

// Violated paths added per round of constraint generation.
constexpr int kBatch = 32;

// Over-relaxation of the coordinate steps (projected SOR; any value in (0, 2)).
constexpr double kRelax = 1.7;

// Dual passes between two path searches.
constexpr long kInnerSweeps = 20;

std::vector<char> mask_of(const MeshGraph& g, const std::vector<int>& nodes, bool empty_means_all) {
  std::vector<char> m(g.size(), empty_means_all && nodes.empty() ? 1 : 0);
  for (int v : nodes) m[v] = 1;
  return m;
}

void validate_family(const MeshGraph& g, const CurveFamily& fam) {
  if (fam.E.empty() || fam.F.empty()) throw InputError("E and F must be nonempty");
  const int n = int(g.size());
  for (const auto* set : {&fam.E, &fam.F, &fam.G})
    for (int v : *set)
      if (v < 0 || v >= n) throw InputError("family node out of range");
  const auto inF = mask_of(g, fam.F, false);
  for (int v : fam.E)
    if (inF[v]) throw InputError("E and F must be disjoint");
  if (!fam.G.empty()) {
    const auto inG = mask_of(g, fam.G, false);
    for (const auto* set : {&fam.E, &fam.F})
      for (int v : *set)
        if (!inG[v]) throw InputError("E and F must lie in G");
  }
}

struct PathSearch {
  std::vector<int> parent;
  std::vector<double> exact;       // rho-length from E along the tree
  std::vector<double> step;        // length of the tree edge into each node
  std::vector<int> hits;           // F nodes settled, nearest first
  double length = kInfDist;        // rho-distance from E to F
};

// rho-shortest paths from E into F inside G. The search runs past the nearest
// F node only while tree lengths stay below `horizon`.
PathSearch shortest(const MeshGraph& g, const std::vector<double>& rho, const std::vector<char>& inG,
                    const std::vector<char>& inF, const std::vector<int>& E, double horizon) {
  const std::size_t n = g.size();
  PathSearch ps;
  ps.parent.assign(n, -1);
  ps.exact.assign(n, kInfDist);
  ps.step.assign(n, 0);
  std::vector<double> key(n, kInfDist);
  MinHeap heap;
  for (int s : E) {
    key[s] = ps.exact[s] = 0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > key[u]) continue;
    if (inF[u]) {
      if (ps.hits.empty()) ps.length = ps.exact[u];
      ps.hits.push_back(u);
      continue;
    }
    if (!ps.hits.empty() && ps.exact[u] >= horizon) break;
    for (int o = g.offsets[u]; o < g.offsets[u + 1]; ++o) {
      const int v = g.targets[o];
      if (!inG[v]) continue;
      const double w = g.weights[o];
      const double c = 0.5 * w * (rho[u] + rho[v]);
      const double nk = d + c + kTieBreak * w;
      if (nk < key[v]) {
        key[v] = nk;
        ps.exact[v] = ps.exact[u] + c;
        ps.parent[v] = u;
        ps.step[v] = w;
        heap.emplace(nk, v);
      }
    }
  }
  return ps;
}

double exact_shortest(const MeshGraph& g, const std::vector<double>& rho, const std::vector<char>& inG,
                      const std::vector<char>& inF, const std::vector<int>& E) {
  std::vector<double> dist(g.size(), kInfDist);
  MinHeap heap;
  for (int s : E) {
    dist[s] = 0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (inF[u]) return d;
    for (int o = g.offsets[u]; o < g.offsets[u + 1]; ++o) {
      const int v = g.targets[o];
      if (!inG[v]) continue;
      const double nd = d + 0.5 * g.weights[o] * (rho[u] + rho[v]);
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return kInfDist;
}

double edge_weight(const MeshGraph& g, int a, int b) {
  for (int o = g.offsets[a]; o < g.offsets[a + 1]; ++o)
    if (g.targets[o] == b) return g.weights[o];
  throw InputError("path nodes " + std::to_string(a) + " and " + std::to_string(b) + " are not adjacent");
}

}  // namespace

double rho_length(const MeshGraph& g, const std::vector<double>& rho, const std::vector<int>& path) {
  double len = 0;
  for (std::size_t i = 1; i < path.size(); ++i)
    len += 0.5 * edge_weight(g, path[i - 1], path[i]) * (rho[path[i - 1]] + rho[path[i]]);
  return len;
}

double rho_shortest(const MeshGraph& g, const std::vector<double>& rho, const CurveFamily& fam) {
  validate_family(g, fam);
  if (rho.size() != g.size()) throw InputError("density must have one value per node");
  return exact_shortest(g, rho, mask_of(g, fam.G, true), mask_of(g, fam.F, false), fam.E);
}

ModulusResult mod2(const MeshGraph& g, const CurveFamily& fam, const ModulusOptions& opts) {
  validate_family(g, fam);
  const std::size_t n = g.size();
  const auto inG = mask_of(g, fam.G, true);
  const auto inF = mask_of(g, fam.F, false);
  ModulusResult res;
  res.rho.rho.assign(n, 0.0);
  res.rho.weight = g.area;
  std::vector<double> rho(n, 0.0);
  const std::vector<double>& w = g.area;

  std::vector<Constraint> cons;
  double best_lower = 0, best_upper = kInfDist;
  std::vector<char> used(n, 0);

  // Projected SOR on the dual over the generated constraints; stops once the
  // largest violation is at most `target` or after `sweeps` passes.
  auto ascend = [&](double target, long sweeps) {
    for (long sweep = 0; sweep < sweeps; ++sweep) {
      ++res.sweeps;
      double worst = 0;
      for (auto& k : cons) {
        double len = 0;
        for (const auto& [v, a] : k.coef) len += a * rho[v];
        const double gap = 1 - len;
        const double next = std::max(0.0, k.lambda + kRelax * gap / k.q);
        const double delta = next - k.lambda;
        if (k.lambda > 0 || gap > 0) worst = std::max(worst, std::abs(gap));
        if (delta != 0) {
          // Clamped: cancellation can leave -1e-17, and a negative density
          // would give the path searches negative cycles.
          for (const auto& [v, a] : k.coef) rho[v] = std::max(0.0, rho[v] + delta * a / (2 * w[v]));
          k.lambda = next;
        }
      }
      if (worst <= target) break;
    }
  };

  long stalled = 0;
  for (;;) {
    const PathSearch ps = shortest(g, rho, inG, inF, fam.E, 1 - opts.tol);
    if (ps.hits.empty()) {
      if (cons.empty()) {
        res.empty = true;
        res.certificate = kInfDist;
        return res;
      }
      throw InputError("family lost connectivity during the solve");
    }
    double energy = 0, lsum = 0;
    for (std::size_t i = 0; i < n; ++i) energy += w[i] * rho[i] * rho[i];
    for (const auto& c : cons) lsum += c.lambda;
    best_lower = std::max(best_lower, lsum - energy);
    if (ps.length > 0 && energy / (ps.length * ps.length) < best_upper) {
      best_upper = energy / (ps.length * ps.length);
      res.rho.rho = rho;
      for (double& x : res.rho.rho) x /= ps.length;
      res.certificate = ps.length;
    }
    if (best_upper < kInfDist && best_upper - best_lower <= opts.gap * best_upper) break;
    if (res.paths >= opts.max_paths || stalled > 10L * long(cons.size()) + 1000) {
      std::ostringstream os;
      os << "modulus solve did not close the gap (" << res.paths << " paths); bounds [" << best_lower << ", "
         << best_upper << "]";
      throw NonConvergence(os.str());
    }

    // A batch of violated paths that share at most half their nodes with
    // paths already taken this round.
    std::fill(used.begin(), used.end(), 0);
    int added = 0;
    for (int hit : ps.hits) {
      if (ps.exact[hit] >= 1 - opts.tol || added >= kBatch || res.paths >= opts.max_paths) break;
      std::vector<int> path;
      int seen = 0;
      for (int v = hit; v >= 0; v = ps.parent[v]) {
        path.push_back(v);
        seen += used[v];
      }
      if (added > 0 && 2 * seen > int(path.size())) continue;
      for (int v : path) used[v] = 1;
      std::reverse(path.begin(), path.end());
      Constraint c;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double half = 0.5 * ps.step[path[i + 1]];
        c.coef.emplace_back(path[i], half);
        c.coef.emplace_back(path[i + 1], half);
      }
      std::sort(c.coef.begin(), c.coef.end());
      std::vector<std::pair<int, double>> merged;
      for (const auto& [v, a] : c.coef) {
        if (!merged.empty() && merged.back().first == v) merged.back().second += a;
        else merged.emplace_back(v, a);
      }
      c.coef = std::move(merged);
      for (const auto& [v, a] : c.coef) c.q += a * a / (2 * w[v]);
      c.path = std::move(path);
      cons.push_back(std::move(c));
      ++res.paths;
      ++added;
    }
    // Only violated paths are added; once none is, the remaining gap is
    // closed by the dual ascent alone.
    stalled = added ? 0 : stalled + kInnerSweeps;
    ascend(0.25 * std::max(0.0, 1 - ps.length), kInnerSweeps);
  }

  // The kept density is the best one, scaled to be admissible.
  rho = res.rho.rho;
  res.certificate = exact_shortest(g, rho, inG, inF, fam.E);
  res.value = 0;
  for (std::size_t i = 0; i < n; ++i) res.value += w[i] * rho[i] * rho[i];
  for (auto& c : cons)
    if (c.lambda > 0) res.active.push_back(std::move(c.path));
  res.rho.energy = res.value;
  res.lower = best_lower;
  res.upper = best_upper;
  return res;
}

std::vector<int> mesh_ball(const MeshGraph& g, int center, double r) {
  const auto d = dijkstra(g, center);
  std::vector<int> out;
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] <= r) out.push_back(int(v));
  return out;
}

std::vector<int> mesh_outside(const MeshGraph& g, int center, double r) {
  const auto d = dijkstra(g, center);
  std::vector<int> out;
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] >= r && d[v] != kInfDist) out.push_back(int(v));
  return out;
}

namespace {

// Two-sweep estimate of the graph diameter (within a factor 2 from below).
double diameter_estimate(const MeshGraph& g) {
  auto d = dijkstra(g, 0);
  int far = 0;
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] != kInfDist && d[v] > d[far]) far = int(v);
  d = dijkstra(g, far);
  double D = 0;
  for (double x : d)
    if (x != kInfDist) D = std::max(D, x);
  return D;
}

int dyadic_count(double L, double r, double R) {
  int N = 0;
  double x = r;
  while (x * L <= R * (1 + 1e-12)) {
    x *= L;
    ++N;
  }
  return N;
}

}  // namespace

AnnulusSample annulus_modulus(const MeshGraph& g, int center, double r, double L, const ModulusOptions& opts) {
  if (!(L > 1) || !(r > 0)) throw InputError("annulus needs L > 1 and r > 0");
  if (center < 0 || std::size_t(center) >= g.size()) throw InputError("center out of range");
  AnnulusSample s;
  s.center = center;
  s.r = r;
  const auto d = dijkstra(g, center);
  CurveFamily fam;
  for (std::size_t v = 0; v < d.size(); ++v) {
    if (d[v] <= r) fam.E.push_back(int(v));
    else if (d[v] >= L * r && d[v] != kInfDist) fam.F.push_back(int(v));
  }
  if (fam.F.empty()) {
    s.empty = true;
    return s;
  }
  const auto res = mod2(g, fam, opts);
  s.empty = res.empty;
  s.modulus = res.value;
  return s;
}

AnnulusReport annulus_condition(const MetricComplex& c, int m, double L, int centers, int scales,
                                std::uint64_t seed, const ModulusOptions& opts) {
  if (!(L > 1)) throw InputError("L must exceed 1");
  if (centers < 1 || scales < 1) throw InputError("need at least one center and one scale");
  const MeshGraph g = mesh_graph(c, m, kModulusStencil);
  const double D = diameter_estimate(g);
  const int nv = int(c.vertex_count());
  std::vector<int> cs;
  for (int i = 0; i < centers; ++i) cs.push_back(int(splitmix64(seed + std::uint64_t(i)) % std::uint64_t(nv)));
  std::vector<AnnulusSample> samples(std::size_t(centers) * scales);
  parallel_for(samples.size(), [&](std::size_t idx) {
    samples[idx] = annulus_modulus(g, cs[idx / scales], D / L / std::ldexp(1.0, int(idx % scales) + 1), L, opts);
  });
  AnnulusReport rep;
  for (const auto& s : samples) {
    if (rep.witness.center < 0 || s.modulus > rep.max_modulus) {
      rep.max_modulus = s.modulus;
      rep.witness = s;
    }
  }
  rep.samples = std::move(samples);
  return rep;
}

double telescoping_bound(double M, double L, double r, double R) {
  if (!(M > 0) || !(L > 1) || !(r > 0)) throw InputError("telescoping bound needs M > 0, L > 1 and r > 0");
  if (R < L * r * (1 - 1e-12)) throw PreconditionError("telescoping bound needs R >= L r");
  return M / dyadic_count(L, r, R);
}

TelescopingCheck telescoping_check(const MeshGraph& g, int center, double L, double r, double R,
                                   const ModulusOptions& opts) {
  TelescopingCheck tc;
  tc.N = dyadic_count(L, r, R);
  if (tc.N < 1) throw PreconditionError("telescoping bound needs R >= L r");
  if (center < 0 || std::size_t(center) >= g.size()) throw InputError("center out of range");
  const auto d = dijkstra(g, center);
  double longest = 0;
  for (double x : g.weights) longest = std::max(longest, x);
  if (longest >= (L - 1) * r) throw PreconditionError("mesh edges are longer than the thinnest shell");

  tc.shells.assign(tc.N, 0);
  for (int k = 0; k < tc.N; ++k) {
    const double lo = r * std::pow(L, k), hi = r * std::pow(L, k + 1);
    CurveFamily fam;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!(d[v] > lo && d[v] < hi)) continue;
      fam.G.push_back(int(v));
      bool inner = false, outer = false;
      for (int o = g.offsets[v]; o < g.offsets[v + 1]; ++o) {
        inner = inner || d[g.targets[o]] <= lo;
        outer = outer || d[g.targets[o]] >= hi;
      }
      // A node in both layers would let a crossing path pay nothing in A_k.
      if (inner && outer) throw PreconditionError("shell " + std::to_string(k) + " is one node thick");
      if (inner) fam.E.push_back(int(v));
      if (outer) fam.F.push_back(int(v));
    }
    if (fam.E.empty() || fam.F.empty()) throw PreconditionError("shell " + std::to_string(k) + " has no crossing");
    // Admissible upper bound: the averaged density argument needs rho_k admissible.
    tc.shells[k] = mod2(g, fam, opts).upper;
  }
  tc.M = *std::max_element(tc.shells.begin(), tc.shells.end());
  tc.bound = tc.M / tc.N;
  CurveFamily direct;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (d[v] <= r) direct.E.push_back(int(v));
    else if (d[v] >= R && d[v] != kInfDist) direct.F.push_back(int(v));
  }
  const auto res = mod2(g, direct, opts);
  tc.direct = res.value;
  tc.direct_lower = res.lower;
  tc.dominated = tc.direct <= tc.bound + 4 * opts.tol * std::max(1.0, tc.bound);
  return tc;
}

LoewnerProfile loewner_profile(const MeshGraph& g, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                               const ModulusOptions& opts) {
  LoewnerProfile prof;
  auto set_diam = [&](const std::vector<int>& S) {
    double D = 0;
    for (int s : S) {
      const auto d = dijkstra(g, s);
      for (int t : S) D = std::max(D, d[t]);
    }
    return D;
  };
  std::vector<LoewnerPoint> pts(pairs.size());
  std::vector<char> keep(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [E, F] = pairs[i];
    if (E.size() < 2 || F.size() < 2) return;
    std::vector<int> a = E, b = F;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) return;
    const auto dE = dijkstra(g, E);
    double dist = kInfDist;
    for (int f : F) dist = std::min(dist, dE[f]);
    const double m = std::min(set_diam(E), set_diam(F));
    if (!(m > 0) || dist == kInfDist) return;
    pts[i].delta = dist / m;
    pts[i].modulus = mod2(g, {E, F, {}}, opts).value;
    keep[i] = 1;
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) prof.points.push_back(pts[i]);
    else ++prof.skipped;
  }
  std::sort(prof.points.begin(), prof.points.end(),
            [](const LoewnerPoint& a, const LoewnerPoint& b) { return a.delta < b.delta; });
  double running = kInfDist;
  for (const auto& p : prof.points) {
    running = std::min(running, p.modulus);
    prof.envelope.push_back({p.delta, running});
  }
  return prof;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> geodesic_pairs(const MeshGraph& g, int count,
                                                                          std::uint64_t seed) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  if (g.size() < 4) return out;
  const double D = diameter_estimate(g);
  const std::uint64_t n = g.size();
  std::uint64_t h = seed;
  auto next = [&] { return h = splitmix64(h); };
  auto uniform = [&] { return double(next() >> 11) * 0x1.0p-53; };
  // Random node at distance in [lo, hi] from `from`, or -1.
  auto pick = [&](const std::vector<double>& d, double lo, double hi) {
    std::vector<int> c;
    for (std::size_t v = 0; v < d.size(); ++v)
      if (d[v] >= lo && d[v] <= hi) c.push_back(int(v));
    return c.empty() ? -1 : c[next() % c.size()];
  };
  for (int i = 0, tries = 0; i < count && tries < 20 * count; ++tries) {
    const int a = int(next() % n);
    const auto da = dijkstra(g, a);
    const double len = D * (0.05 + 0.15 * uniform());
    const double gap = D * (0.02 + 0.4 * uniform());
    const int b = pick(da, 0.8 * len, len);
    const int c = pick(da, len + gap, len + gap * 1.2 + 1e-12);
    if (b < 0 || c < 0) continue;
    const auto dc = dijkstra(g, c);
    const int e = pick(dc, 0.8 * len, len);
    if (e < 0) continue;
    auto E = shortest_path(g, a, b), F = shortest_path(g, c, e);
    std::vector<int> sE = E, sF = F;
    std::sort(sE.begin(), sE.end());
    std::sort(sF.begin(), sF.end());
    std::vector<int> common;
    std::set_intersection(sE.begin(), sE.end(), sF.begin(), sF.end(), std::back_inserter(common));
    if (!common.empty()) continue;
    out.emplace_back(std::move(E), std::move(F));
    ++i;
  }
  return out;
}

}  // namespace polyqs
