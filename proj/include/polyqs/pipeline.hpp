#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polyqs/approximation.hpp"
#include "polyqs/complex.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/finite_metric.hpp"
#include "polyqs/glue.hpp"

namespace polyqs {

struct PipelineInput {
  MetricComplex Z;                 // equilateral triangles of a common side t
  FiniteMetric target;             // d_X(tau p_u, tau p_v), indexed by Z's vertices
  std::optional<double> alpha;     // empty: select_alpha
  int mesh_level = 4;

  // Optional certificate sample of X. tau maps the vertices of Z' (originals
  // first, then one barycenter per face of Z) into X; -1 leaves a barycenter
  // unmapped, and phi then sends it to the first vertex of its face. Without X
  // the target itself is the sample and tau is the identity on Z's vertices.
  FiniteMetric X;
  PointMap tau;

  bool certify_axioms = true;      // skeleton and image approximation checks
  std::uint64_t qs_budget = 200000;
  std::uint64_t seed = 0;
};

struct PipelineOutput {
  double t = 0;                    // side of Z
  double alpha = 0;
  Subdivision Zp;
  MetricComplex Y;
  PointMap f;                      // Z' vertex -> Y vertex
  std::vector<int> S;              // Y's original vertices
  FiniteMetric d_S;
  FiniteMetric d_Y;                // on Y's vertices, alpha times the unit-alpha mesh distances
  GluedMetric glued;               // glued.result is d~ on Y's vertices

  QCCertificate qc;                // of Y
  bool dS_below_dY = false;        // exact, on every vertex pair
  bool dtilde_is_dS = false;       // exact, on the original vertices
  double hyp2_ratio = 0;           // min over u != v of d_Z'(p_u, p_v) / r_u
  double hyp4_L = 1;               // max over adjacent originals of d_Y / d_S

  CertifiedConstants constants;    // from qc_certificate(Z')
  AxiomReport skeleton_axioms;     // Z' skeleton on its vertex sample
  double image_lambda = 1;         // bilip constant of f on vertices, d_Z' -> d~
  AxiomReport image_axioms;        // image in (Y, d~) at (K, lambda^2 L)

  PointMap phi;                    // Y vertex -> X sample
  EpsIsometryCert eps_iso;         // phi: (Y vertices, d~) -> (X, d_X)
  std::vector<int> mapped;         // Y vertices with tau defined (domain of f o tau^-1)
  double bilip = 1;                // of f o tau^-1 on the mapped vertices
  DistortionProfile qs;
};

// Unit-alpha complex Y1 and its vertex distances: d_Y1 on Y's vertices at mesh level m.
struct UnitAlpha {
  AssembledY Y1;
  FiniteMetric d_Y1;
};

UnitAlpha unit_alpha(const MetricComplex& Z, const Subdivision& Zp, const FiniteMetric& target, int m);

// Least alpha with target(u, v) <= alpha * d_Y1(u, v) on every original vertex
// pair, where the product is evaluated in floating point exactly as the
// pipeline evaluates d_Y. Throws PreconditionError when Y1 is disconnected.
double select_alpha(const FiniteMetric& target, const FiniteMetric& d_Y1);

PipelineOutput run_pipeline(const PipelineInput& in);

struct EpsBoundFit {
  double C1 = 0, C2 = 1;
  double slope = 0;                // least-squares slope of log eps against log t
  bool monotone = false;           // eps strictly decreases with t
};

// Fits eps(t) <= 4 C1 H(C2 t) over at least three scales; C2 is scanned on a
// dyadic grid and the smallest resulting C1 is kept. Throws InputError for
// fewer than three scales.
EpsBoundFit eps_bound_report(const std::vector<double>& t, const std::vector<double>& eps,
                             const DistortionFunction& H);

}  // namespace polyqs
