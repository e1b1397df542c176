#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "polyqs/complex.hpp"
#include "polyqs/mesh_graph.hpp"

namespace polyqs {

// Stencil used for modulus meshes: short lattice offsets only, so paths cannot
// skip the nodes whose density they should pay for.
inline constexpr int kModulusStencil = 3;

// Gamma(E, F; G): mesh paths from E to F through nodes of G (empty G = all).
struct CurveFamily {
  std::vector<int> E, F, G;
};

struct DensityField {
  std::vector<double> rho;         // per node
  std::vector<double> weight;      // area share per node
  double energy = 0;               // sum rho^2 * weight
};

struct ModulusOptions {
  double tol = 1e-6;               // admissibility: certificate >= 1 - tol
  double gap = 1e-3;               // stop once (upper - lower) <= gap * upper
  int max_paths = 200000;          // constraint generation cap
};

struct ModulusResult {
  double value = 0;                // energy of the returned density (= upper up to rounding)
  double lower = 0;                // dual value: the modulus is at least this
  double upper = 0;                // the modulus is at most this
  double certificate = 0;          // rho-length of the rho-shortest path, recomputed for the returned rho
  DensityField rho;                // admissible: scaled by the inverse of its shortest length
  std::vector<std::vector<int>> active;  // paths with a positive multiplier
  int paths = 0;                   // constraints generated
  long sweeps = 0;                 // coordinate ascent sweeps
  bool empty = false;              // E and F are not joined inside G
};

// Discrete conformal 2-modulus: min sum rho^2 w over node densities whose
// trapezoidal length along every path of the family is at least 1. Constraint
// generation with dual coordinate ascent; every round yields a dual lower
// bound and, by scaling rho with its shortest path length, an admissible upper
// bound. Throws InputError on malformed families and NonConvergence (with the
// bracket) when the cap is hit.
ModulusResult mod2(const MeshGraph& g, const CurveFamily& fam, const ModulusOptions& opts = {});

// Trapezoidal rho-length of a node path.
double rho_length(const MeshGraph& g, const std::vector<double>& rho, const std::vector<int>& path);

// rho-shortest path length from E to F inside G (infinity when not joined).
double rho_shortest(const MeshGraph& g, const std::vector<double>& rho, const CurveFamily& fam);

// Nodes with mesh distance <= r from `center` (closed ball).
std::vector<int> mesh_ball(const MeshGraph& g, int center, double r);
// Nodes with mesh distance >= r from `center` (complement of the open ball).
std::vector<int> mesh_outside(const MeshGraph& g, int center, double r);

struct AnnulusSample {
  int center = -1;
  double r = 0;
  double modulus = 0;
  bool empty = false;
};

struct AnnulusReport {
  double max_modulus = 0;
  AnnulusSample witness;
  std::vector<AnnulusSample> samples;
};

// mod2(Gamma(B(center, r), X \ B(center, L r))) in the mesh metric; empty (and 0)
// when no node lies outside B(center, L r).
AnnulusSample annulus_modulus(const MeshGraph& g, int center, double r, double L, const ModulusOptions& opts = {});

// max over sampled balls of mod2(Gamma(B(a, r), X \ B(a, L r))). Centers are
// seeded original vertices; r runs over diam / L / 2^k, k = 1..scales.
AnnulusReport annulus_condition(const MetricComplex& c, int m, double L, int centers, int scales,
                                std::uint64_t seed, const ModulusOptions& opts = {});

// M / N with N = max{k : L^k r <= R}. Throws PreconditionError when R < L r.
double telescoping_bound(double M, double L, double r, double R);

struct TelescopingCheck {
  int N = 0;
  double M = 0;                    // max modulus over the shell families
  std::vector<double> shells;      // per-shell modulus
  double bound = 0;                // M / N
  double direct = 0;               // mod2(Gamma(B(a, r), X \ B(a, R)))
  double direct_lower = 0;
  bool dominated = false;          // direct <= bound, allowing solver tolerance
};

// Nested annuli A_k = {L^k r < d < L^{k+1} r}, k < N, with the shell family
// running inside A_k from its inner layer to its outer layer. The average of
// the shell densities is admissible for the direct family, so the direct
// modulus is at most M / N.
TelescopingCheck telescoping_check(const MeshGraph& g, int center, double L, double r, double R,
                                   const ModulusOptions& opts = {});

struct LoewnerPoint {
  double delta = 0;                // dist(E, F) / min(diam E, diam F)
  double modulus = 0;
};

struct LoewnerProfile {
  std::vector<LoewnerPoint> points;      // sorted by delta
  std::vector<LoewnerPoint> envelope;    // phi(t) = min{mod : delta <= t}, at each sample
  int skipped = 0;                       // degenerate continua
};

LoewnerProfile loewner_profile(const MeshGraph& g, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                               const ModulusOptions& opts = {});

// Seeded continuum pairs: mesh geodesic segments between random nearby nodes.
std::vector<std::pair<std::vector<int>, std::vector<int>>> geodesic_pairs(const MeshGraph& g, int count,
                                                                          std::uint64_t seed);

}  // namespace polyqs
