#pragma once

#include <climits>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polyqs/complex.hpp"
#include "polyqs/finite_metric.hpp"
#include "polyqs/mesh_graph.hpp"

namespace polyqs {

// A sampled metric space: a dense matrix or the nodes of a mesh graph.
class MetricHost {
public:
  virtual ~MetricHost() = default;
  virtual std::size_t size() const = 0;
  // Points within `limit` of the source set, with their distance, nearest first.
  virtual std::vector<std::pair<int, double>> ball(const std::vector<int>& sources, double limit) const = 0;
  virtual double distance(int x, int y) const = 0;
};

class MatrixHost final : public MetricHost {
public:
  explicit MatrixHost(const FiniteMetric& m) : m_(m) {}
  std::size_t size() const override { return m_.size(); }
  std::vector<std::pair<int, double>> ball(const std::vector<int>& sources, double limit) const override;
  double distance(int x, int y) const override { return m_(x, y); }

private:
  const FiniteMetric& m_;
};

class MeshHost final : public MetricHost {
public:
  explicit MeshHost(const MeshGraph& g);
  std::size_t size() const override { return g_.size(); }
  std::vector<std::pair<int, double>> ball(const std::vector<int>& sources, double limit) const override;
  double distance(int x, int y) const override;
  const MeshGraph& graph() const { return g_; }

private:
  const MeshGraph& g_;
  std::uint64_t id_;
};

// The quadruple (G, p, r, U). U[v] holds sorted host point ids.
struct Approximation {
  Adjacency adjacency;
  std::vector<int> p;
  std::vector<double> r;
  std::vector<std::vector<int>> U;
  std::size_t vertex_count() const { return p.size(); }
};

inline constexpr int kUnreachable = INT_MAX;

// Combinatorial distance k(u, v); kUnreachable when disconnected.
int comb_distance(const Approximation& a, int u, int v);
// k(v, .) for all vertices, up to depth `limit` (kUnreachable beyond).
std::vector<int> comb_distances(const Approximation& a, int v, int limit = kUnreachable);

// st_K(v): union of U_u over k(u, v) < K, sorted.
std::vector<int> star(const Approximation& a, int v, double K);

struct AxiomResult {
  bool pass = true;
  double worst = 0;            // largest observed ratio or excess for this axiom
  std::vector<int> witness;    // vertices and points, meaning given by `detail`
  std::string detail;
};

struct AxiomReport {
  double K = 0, L = 0;
  AxiomResult A1;              // valence <= K
  AxiomResult A2_ball;         // B(p_v, r_v) inside U_v
  AxiomResult A2_cover;        // U_v inside B(p_v, L r_v)
  AxiomResult A3_adjacent;     // u ~ v: U_u meets U_v and r ratio <= L
  AxiomResult A3_converse;     // U_u meets U_v  =>  k(u, v) < K
  AxiomResult A4;              // N(U_v, r_v / L) inside st_K(v)
  AxiomResult fine;            // U_v is not the whole host
  AxiomResult A6;              // k(u, v) >= 2K  =>  U_u misses N(U_v, r_v / L)
  AxiomResult A7;              // two-sided comparability with C(L) = 2L^2 + 1
  bool axioms_pass() const;    // (A1)-(A4)
  bool pass() const;           // (A1)-(A4), fineness and (A6)-(A7)
};

struct AxiomOptions {
  double tol = kMetricTol;
  bool derived = true;         // evaluate (A6) and (A7)
  int a7_sources = 16;         // sampled vertices u for (A7)
  std::uint64_t seed = 0;
};

AxiomReport check_axioms(const Approximation& a, const MetricHost& host, double K, double L,
                         const AxiomOptions& opts = {});

// Smallest L for which (A2) and the ratio part of (A3) hold at sample resolution.
double tight_L(const Approximation& a, const MetricHost& host);

// 1-skeleton approximation: p_v = v, r_v = epsilon(v), U_v = mesh nodes of the
// closed star of v (the closure stands in for the interior at sample resolution).
Approximation skeleton_approximation(const MetricComplex& c, const MeshGraph& g);

// Same approximation sampled on the vertex set only (host ids = vertex ids).
Approximation restrict_to_vertices(const Approximation& a, std::size_t vertex_count);

struct CertifiedConstants {
  double K = 3;
  double L = 1;
};

// K = max(3, ceil(M)) and L from the frozen calibration of the shape part of the certificate.
CertifiedConstants certified_constants(const QCCertificate& cert);

// Image under a point map f: src -> dst. r'_v is the least d_dst(f x, f p_v) over
// sample points x with d_src(x, p_v) >= r_v. Throws PreconditionError when no
// such x exists (U_v is everything at sample scale).
Approximation image_approximation(const Approximation& a, const MetricHost& src, const PointMap& f,
                                  const MetricHost& dst);

struct ChainReport {
  std::vector<int> chain;      // u = w_0, ..., w_n = v
  int max_step = 0;            // max k(w_{i-1}, w_i)
  double diam = 0;             // diam {p_{w_i}}
  double dist = 0;             // d(p_u, p_v)
  double ratio = 1;            // diam / dist (1 when u = v)
};

// Walks a mesh geodesic from p_u to p_v and records the cover element owning
// each node (the carrier vertex of largest barycentric weight).
ChainReport chain_between(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int u, int v);

struct QuasiconvexReport {
  std::vector<int> chain;      // consecutive vertices adjacent
  double r_sum = 0;
  double dist = 0;
  double ratio = 0;            // r_sum / dist
};

// Requires k(u, v) >= K, otherwise throws PreconditionError.
QuasiconvexReport quasiconvex_chain(const Approximation& a, const MetricComplex& c, const MeshGraph& g, int u,
                                    int v, double K);

struct StarDistortion {
  double factor = 1;           // max over sampled stars of the two-sided ratio distortion
  int vertex = -1;
  std::vector<int> pair;
};

// Empirical check for a simplicial isomorphism X -> Y (same combinatorics,
// different lengths): compares d(x, y) / r_v in both skeleton approximations for
// vertices x, y in st_Kstar(v), over `samples` seeded vertices v.
StarDistortion isomorphism_star_distortion(const MetricComplex& X, const MetricComplex& Y, int m, double Kstar,
                                           int samples, std::uint64_t seed);

}  // namespace polyqs
