#include "polyqs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyqs/errors.hpp"
#include "polyqs/mesh_graph.hpp"

namespace polyqs {

namespace {

double common_side(const MetricComplex& Z) {
  if (Z.triangles.empty()) throw InputError("Z has no triangles");
  const double t = Z.triangles[0].len[0];
  for (const auto& tr : Z.triangles)
    for (double l : tr.len)
      if (std::abs(l - t) > 1e-9 * std::max(1.0, t))
        throw InputError("Z must consist of equilateral triangles of one side length");
  return t;
}

std::vector<double> target_edge_lengths(const MetricComplex& Z, const FiniteMetric& target, double alpha) {
  std::vector<double> d(Z.edges.size());
  for (std::size_t e = 0; e < d.size(); ++e) d[e] = alpha * target(Z.edges[e].a, Z.edges[e].b);
  return d;
}

FiniteMetric vertex_metric(const MetricComplex& c, int m) {
  const MeshGraph g = mesh_graph(c, m);
  std::vector<int> v(c.vertex_count());
  std::iota(v.begin(), v.end(), 0);
  FiniteMetric out(v.size());
  out.points = c.vertices;
  out.dist = distance_rows(g, v, v);
  // Dijkstra rows agree up to rounding in the order of summation; take the
  // smaller entry so the matrix is exactly symmetric.
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) out.at(i, j) = out.at(j, i) = std::min(out(i, j), out(j, i));
  for (double d : out.dist)
    if (d == kInfDist) throw PreconditionError("complex is disconnected");
  return out;
}

}  // namespace

UnitAlpha unit_alpha(const MetricComplex& Z, const Subdivision& Zp, const FiniteMetric& target, int m) {
  if (target.size() != Z.vertex_count()) throw InputError("target must have one point per vertex of Z");
  UnitAlpha u;
  u.Y1 = assemble_Y(Z, Zp, target_edge_lengths(Z, target, 1.0));
  u.d_Y1 = vertex_metric(u.Y1.Y, m);
  return u;
}

double select_alpha(const FiniteMetric& target, const FiniteMetric& d_Y1) {
  const std::size_t s = target.size();
  if (d_Y1.size() < s) throw InputError("d_Y1 must cover the original vertices");
  double alpha = 0;
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b) {
      if (d_Y1(a, b) == kInfDist) throw PreconditionError("unit-alpha complex is disconnected");
      if (d_Y1(a, b) > 0) alpha = std::max(alpha, target(a, b) / d_Y1(a, b));
    }
  if (alpha <= 0) return 1.0;
  // The quotient is rounded; step up until every product dominates exactly.
  for (;;) {
    bool ok = true;
    for (std::size_t a = 0; a < s && ok; ++a)
      for (std::size_t b = a + 1; b < s && ok; ++b) ok = target(a, b) <= alpha * d_Y1(a, b);
    if (ok) return alpha;
    alpha = std::nextafter(alpha, kInfDist);
  }
}

PipelineOutput run_pipeline(const PipelineInput& in) {
  PipelineOutput out;
  out.t = common_side(in.Z);
  const std::size_t nz = in.Z.vertex_count();
  if (in.target.size() != nz) throw InputError("target must have one point per vertex of Z");
  if (in.mesh_level < 0) throw InputError("mesh level must be nonnegative");
  validate_matrix(in.target);

  out.Zp = subdivide3(in.Z);
  const std::size_t ny = out.Zp.complex.vertex_count();
  const UnitAlpha unit = unit_alpha(in.Z, out.Zp, in.target, in.mesh_level);
  if (in.alpha) {
    if (!(*in.alpha > 0)) throw InputError("alpha must be positive");
    out.alpha = *in.alpha;
  } else {
    out.alpha = select_alpha(in.target, unit.d_Y1);
  }

  const AssembledY Y = assemble_Y(in.Z, out.Zp, target_edge_lengths(in.Z, in.target, out.alpha));
  out.Y = Y.Y;
  out.f = Y.f;
  out.qc = qc_certificate(out.Y);
  // d_Y = alpha * d_Y1: all lengths scale with alpha, so this is the mesh metric
  // of Y evaluated once and reused for every alpha.
  out.d_Y = unit.d_Y1;
  for (double& d : out.d_Y.dist) d *= out.alpha;

  out.S.resize(nz);
  std::iota(out.S.begin(), out.S.end(), 0);
  out.d_S = in.target;
  out.dS_below_dY = true;
  for (std::size_t a = 0; a < nz; ++a)
    for (std::size_t b = 0; b < nz; ++b) out.dS_below_dY = out.dS_below_dY && out.d_S(a, b) <= out.d_Y(a, b);
  out.glued = glue(out.d_Y, out.S, out.d_S);
  const FiniteMetric& dt = out.glued.result;
  out.dtilde_is_dS = true;
  for (std::size_t a = 0; a < nz; ++a)
    for (std::size_t b = 0; b < nz; ++b) out.dtilde_is_dS = out.dtilde_is_dS && dt(a, b) == out.d_S(a, b);

  // Adjacent originals of Z': the edges of Z.
  for (const auto& e : in.Z.edges)
    if (out.d_S(e.a, e.b) > 0) out.hyp4_L = std::max(out.hyp4_L, out.d_Y(e.a, e.b) / out.d_S(e.a, e.b));

  // Z' with its own metric: hypothesis (2) and the approximation certificates.
  const FiniteMetric dZp = vertex_metric(out.Zp.complex, in.mesh_level);
  out.hyp2_ratio = kInfDist;
  std::vector<double> eps(ny);
  for (std::size_t u = 0; u < ny; ++u) eps[u] = epsilon_x(out.Zp.complex, int(u));
  for (std::size_t u = 0; u < ny; ++u)
    for (std::size_t v = 0; v < ny; ++v)
      if (u != v) out.hyp2_ratio = std::min(out.hyp2_ratio, dZp(u, v) / eps[u]);

  out.constants = certified_constants(qc_certificate(out.Zp.complex));
  out.image_lambda = bilip_constant(out.f, dZp, dt);
  if (in.certify_axioms) {
    const MeshGraph gzp = mesh_graph(out.Zp.complex, 0);
    const Approximation skel = restrict_to_vertices(skeleton_approximation(out.Zp.complex, gzp), ny);
    const MatrixHost hz(dZp), hy(dt);
    AxiomOptions o;
    o.seed = in.seed;
    out.skeleton_axioms = check_axioms(skel, hz, out.constants.K, out.constants.L, o);
    const Approximation img = image_approximation(skel, hz, out.f, hy);
    out.image_axioms = check_axioms(img, hy, out.constants.K,
                                    out.image_lambda * out.image_lambda * out.constants.L, o);
  }

  // Certificate sample of X and the map phi.
  const FiniteMetric& X = in.X.size() ? in.X : in.target;
  PointMap tau = in.tau;
  if (tau.empty()) {
    if (in.X.size()) throw InputError("tau is required with an explicit X sample");
    tau.assign(ny, -1);
    for (std::size_t v = 0; v < nz; ++v) tau[v] = int(v);
  }
  if (tau.size() != ny) throw InputError("tau must have one entry per vertex of Z'");
  for (std::size_t v = 0; v < ny; ++v) {
    if (tau[v] >= int(X.size()) || (v < nz && tau[v] < 0)) throw InputError("tau out of range");
  }
  out.phi.resize(ny);
  for (std::size_t v = 0; v < ny; ++v) {
    if (tau[v] >= 0) {
      out.phi[out.f[v]] = tau[v];
      out.mapped.push_back(int(v));
    } else {
      const int face = int(v - nz);
      out.phi[out.f[v]] = tau[in.Z.triangles[face].v[0]];
    }
  }
  out.eps_iso = eps_isometry_cert(out.phi, dt, X);

  std::vector<int> xs, ys;
  for (int v : out.mapped) {
    xs.push_back(tau[v]);
    ys.push_back(out.f[v]);
  }
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("tau must be injective on the vertices it maps");
  const FiniteMetric Xs = X.restrict_to(xs), Ys = dt.restrict_to(ys);
  const PointMap id = [&] {
    PointMap p(xs.size());
    std::iota(p.begin(), p.end(), 0);
    return p;
  }();
  out.bilip = bilip_constant(id, Xs, Ys);
  if (xs.size() >= 3) out.qs = qs_profile(id, Xs, Ys, in.qs_budget, in.seed);
  return out;
}

EpsBoundFit eps_bound_report(const std::vector<double>& t, const std::vector<double>& eps,
                             const DistortionFunction& H) {
  if (t.size() != eps.size()) throw InputError("scales and eps values differ in length");
  if (t.size() < 3) throw InputError("at least three scales are needed to fit the eps bound");
  EpsBoundFit fit;
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  fit.monotone = true;
  for (std::size_t i = 1; i < order.size(); ++i) fit.monotone = fit.monotone && eps[order[i - 1]] < eps[order[i]];

  double best_tight = kInfDist;
  for (int k = -6; k <= 6; ++k) {
    const double C2 = std::ldexp(1.0, k);
    double C1 = 0;
    bool ok = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double h = H(C2 * t[i]);
      if (!(h > 0)) {
        ok = false;
        break;
      }
      C1 = std::max(C1, eps[i] / (4 * h));
    }
    if (!ok) continue;
    double tight = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (eps[i] > 0) tight = std::max(tight, 4 * C1 * H(C2 * t[i]) / eps[i]);
    if (tight < best_tight) {
      best_tight = tight;
      fit.C1 = C1;
      fit.C2 = C2;
    }
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0) || !(eps[i] > 0)) continue;
    const double x = std::log(t[i]), y = std::log(eps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2 && n * sxx - sx * sx > 0) fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace polyqs
