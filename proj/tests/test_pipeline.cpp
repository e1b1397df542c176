#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polyqs/errors.hpp"
#include "polyqs/pipeline.hpp"

using namespace polyqs;

namespace {

const double kPi = 3.14159265358979323846;

// Points of Z' (vertices, then face centroids) in the plane, pushed through a
// smooth perturbation h(x, y) = (x + a sin(2 pi y + p), y + a sin(2 pi x + q)).
// |Dh - I| <= 2 pi a, so h is (1 + 2 pi a)-Lipschitz with inverse Lipschitz
// constant 1 / (1 - 2 pi a).
struct PlanarTarget {
  FiniteMetric X;
  PointMap tau;
  FiniteMetric target;
};

PlanarTarget perturbed_grid(const MetricComplex& Z, double a, double p, double q) {
  std::vector<std::vector<double>> pts;
  auto h = [&](double x, double y) {
    return std::vector<double>{x + a * std::sin(2 * kPi * y + p), y + a * std::sin(2 * kPi * x + q)};
  };
  for (const auto& e : Z.embedding) pts.push_back(h(e[0], e[1]));
  for (const auto& t : Z.triangles) {
    double cx = 0, cy = 0;
    for (int v : t.v) {
      cx += Z.embedding[v][0] / 3;
      cy += Z.embedding[v][1] / 3;
    }
    pts.push_back(h(cx, cy));
  }
  PlanarTarget out;
  out.X = oracle::euclidean(pts);
  out.tau = oracle::identity_map(pts.size());
  std::vector<int> zv = oracle::identity_map(Z.vertex_count());
  out.target = out.X.restrict_to(zv);
  return out;
}

PipelineInput planar_input(int n, double a, double p, double q) {
  PipelineInput in;
  in.Z = flat_grid(n, 1.0 / n);
  auto t = perturbed_grid(in.Z, a, p, q);
  in.target = t.target;
  in.X = t.X;
  in.tau = t.tau;
  in.mesh_level = 2;
  return in;
}

}  // namespace

TEST_CASE("select_alpha on the unit-alpha metric itself is 1") {
  auto Z = flat_grid(3, 1.0);
  auto Zp = subdivide3(Z);
  std::vector<int> zv = oracle::identity_map(Z.vertex_count());
  // Any target works to build Y1; then feed Y1's own vertex distances back.
  auto t0 = perturbed_grid(Z, 0.02, 0.3, 1.1).target;
  auto unit = unit_alpha(Z, Zp, t0, 2);
  auto self = unit.d_Y1.restrict_to(zv);
  CHECK(select_alpha(self, unit.d_Y1) == 1.0);
  // Scaling the target by c scales alpha by c (up to the final rounding step).
  FiniteMetric scaled = self;
  for (double& d : scaled.dist) d *= 2.5;
  const double a = select_alpha(scaled, unit.d_Y1);
  CHECK(a == doctest::Approx(2.5).epsilon(1e-15));
  for (std::size_t i = 0; i < zv.size(); ++i)
    for (std::size_t j = 0; j < zv.size(); ++j) CHECK(scaled(i, j) <= a * unit.d_Y1(i, j));
}

TEST_CASE("select_alpha against a direct ratio computation on the flat grid") {
  auto Z = flat_grid(3, 1.0 / 3);
  auto Zp = subdivide3(Z);
  std::vector<std::vector<double>> pts;
  for (const auto& e : Z.embedding) pts.push_back({e[0], e[1], e[2]});
  const double c = 1.7;
  FiniteMetric target = oracle::euclidean(pts);
  for (double& d : target.dist) d *= c;
  auto unit = unit_alpha(Z, Zp, target, 2);
  double want = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) want = std::max(want, target(i, j) / unit.d_Y1(i, j));
  CHECK(select_alpha(target, unit.d_Y1) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("self-approximation of the flat grid") {
  PipelineInput in;
  in.Z = flat_grid(4, 0.25);
  std::vector<std::vector<double>> pts;
  for (const auto& e : in.Z.embedding) pts.push_back({e[0], e[1], e[2]});
  in.target = oracle::euclidean(pts);
  in.mesh_level = 2;
  auto out = run_pipeline(in);
  CHECK(out.t == doctest::Approx(0.25));
  CHECK(out.dS_below_dY);
  CHECK(out.dtilde_is_dS);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) CHECK(out.glued.result(i, j) == in.target(i, j));
  CHECK(out.bilip == 1.0);
  // phi sends a barycenter to a corner of its face, one apex edge 2t/sqrt3
  // away, so distances move by at most two apex edges. Two barycenters sent
  // to the same corner attain that.
  const double apex = 2 * out.t / std::sqrt(3.0);
  CHECK(out.eps_iso.eps_distortion <= 2 * apex * (1 + 1e-12));
  CHECK(out.eps_iso.eps_distortion == doctest::Approx(2 * apex).epsilon(1e-9));
  CHECK(out.Y.vertex_count() == in.Z.vertex_count() + in.Z.triangles.size());
}

TEST_CASE("pipeline invariants on random perturbed targets") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> amp(0.0, 0.05), phase(0, 2 * kPi);
  for (int it = 0; it < 6; ++it) {
    auto in = planar_input(3 + it % 2, amp(rng), phase(rng), phase(rng));
    in.seed = it;
    auto out = run_pipeline(in);
    INFO("instance " << it);
    CHECK(out.dS_below_dY);
    CHECK(out.dtilde_is_dS);
    CHECK(out.hyp2_ratio >= 1.0 - 1e-9);
    CHECK(out.hyp4_L >= 1.0);
    CHECK(out.skeleton_axioms.pass());
    CHECK(out.image_axioms.pass());
    auto glue_rep = verify_glue_clauses(out.glued);
    CHECK(glue_rep.pass());
    CHECK(out.bilip >= 1.0);
    CHECK(std::isfinite(out.bilip));
    CHECK(out.eps_iso.eps > 0);
  }
}

TEST_CASE("explicit alpha below the selected value violates the gluing precondition") {
  auto in = planar_input(3, 0.03, 0.4, 1.3);
  auto out = run_pipeline(in);
  in.alpha = out.alpha * 0.5;
  CHECK_THROWS_AS(run_pipeline(in), PreconditionError);
  in.alpha = out.alpha * 2;
  auto big = run_pipeline(in);
  CHECK(big.alpha == out.alpha * 2);
  CHECK(big.dtilde_is_dS);
}

TEST_CASE("pipeline input errors") {
  auto in = planar_input(3, 0.03, 0.4, 1.3);
  PipelineInput bad = in;
  bad.Z = rectangle_mesh(1, 1, 2, 2);
  CHECK_THROWS_AS(run_pipeline(bad), InputError);
  bad = in;
  bad.target = in.target.restrict_to({0, 1, 2});
  CHECK_THROWS_AS(run_pipeline(bad), InputError);
  bad = in;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(run_pipeline(bad), InputError);
  bad = in;
  bad.tau.pop_back();
  CHECK_THROWS_AS(run_pipeline(bad), InputError);
  bad = in;
  bad.tau[1] = bad.tau[0];
  CHECK_THROWS_AS(run_pipeline(bad), InputError);
}

TEST_CASE("eps bound fit") {
  const double lam = 1.5;
  auto H = [&](double t) { return lam * lam * t; };
  std::vector<double> t{0.25, 0.125, 0.0625}, eps{0.5, 0.25, 0.125};
  auto fit = eps_bound_report(t, eps, H);
  CHECK(fit.monotone);
  CHECK(fit.slope == doctest::Approx(1.0));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(eps[i] <= 4 * fit.C1 * H(fit.C2 * t[i]) * (1 + 1e-12));
  auto flat = eps_bound_report(t, {0.3, 0.3, 0.1}, H);
  CHECK_FALSE(flat.monotone);
  CHECK_THROWS_AS(eps_bound_report({0.1, 0.2}, {1, 2}, H), InputError);
}
