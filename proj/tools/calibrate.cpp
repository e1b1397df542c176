// Development tool: measures the constants that are frozen in
// include/polyqs/calibration.hpp. Not part of the library.

#include <algorithm>
#include <cstdio>
#include <random>

#include <cstring>
#include <string>

#include "polyqs/approximation.hpp"
#include "polyqs/complex.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/mesh_graph.hpp"

using namespace polyqs;

namespace {

void triangle_sweep() {
  std::mt19937_64 rng(2024);
  for (double M : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0, 100.0}) {
    std::uniform_real_distribution<double> u(1.0, M);
    double qc = 0, m2 = 0, m3 = 0, ang = 10;
    auto visit = [&](double a, double b, double c) {
      if (a > b + c || b > a + c || c > a + b) return;
      auto K = triangle_complex(a, b, c);
      auto cert = qc_certificate(K.complex);
      qc = std::max(qc, cert.M);
      m2 = std::max(m2, cert.M2);
      m3 = std::max(m3, cert.M3);
      for (const auto& t : K.complex.triangles) ang = std::min(ang, min_angle(t));
    };
    for (int it = 0; it < 200000; ++it) {
      double s[3] = {1.0, u(rng), u(rng)};
      if (M > 1) {
        // Pin the extremes 1 and M on random sides half of the time.
        if (it % 2) s[1] = M;
      }
      std::shuffle(s, s + 3, rng);
      visit(s[0], s[1], s[2]);
    }
    visit(1, M, M);
    visit(M, 1, M);
    visit(M, M, 1);
    if (M >= 2) {
      visit(1, M - 1, M);
      visit(M - 1, 1, M);
      visit(M, M - 1, 1);
      visit(1, M, M - 1);
    }
    std::printf("M=%6.2f  qc=%.6f  M2=%.6f  M3=%.6f  min_angle=%.6e\n", M, qc, m2, m3, ang);
  }
}

MetricComplex bumpy(std::mt19937_64& rng, int n, double amp) {
  auto base = flat_grid(n, 1.0);
  std::uniform_real_distribution<double> h(-amp, amp);
  auto pts = base.embedding;
  for (auto& p : pts) p[2] = h(rng);
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : base.triangles) tris.push_back(t.v);
  return complex_from_embedding(pts, tris);
}

// Smallest L (to 1e-3) for which every axiom check passes, by bisection; the
// checks only get easier as L grows.
double min_passing_L(const Approximation& a, const MetricHost& host, double K) {
  double lo = 1, hi = 16;
  AxiomOptions o;
  o.a7_sources = 8;
  if (!check_axioms(a, host, K, hi, o).pass()) return -1;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (check_axioms(a, host, K, mid, o).pass() ? hi : lo) = mid;
  }
  return hi;
}

void skeleton_sweep(int m) {
  std::vector<std::pair<std::string, MetricComplex>> corpus;
  corpus.emplace_back("grid6", flat_grid(6, 1.0));
  corpus.emplace_back("rect", rectangle_mesh(3, 2, 6, 4));
  corpus.emplace_back("torus", flat_torus(6, 1.0));
  corpus.emplace_back("disk", annulus_disk(1, 3, 12, 3));
  corpus.emplace_back("disk2", annulus_disk(0.5, 4, 8, 4));
  corpus.emplace_back("disk3", annulus_disk(1, 2.718281828, 16, 3));
  corpus.emplace_back("rect2", rectangle_mesh(5, 1, 10, 1));
  for (int s = 0; s <= 2; ++s) corpus.emplace_back("snow" + std::to_string(s), snowsphere(s).complex);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 6; ++i) corpus.emplace_back("bumpy" + std::to_string(i), bumpy(rng, 6, 0.15 * (i + 1)));
  for (double M : {1.5, 3.0, 6.0}) {
    std::uniform_real_distribution<double> u(1.0, M);
    double d[3];
    do {
      for (double& x : d) x = u(rng);
    } while (d[0] > d[1] + d[2] || d[1] > d[0] + d[2] || d[2] > d[0] + d[1]);
    corpus.emplace_back("tri" + std::to_string(M), triangle_complex(d[0], d[1], d[2]).complex);
  }
  for (const auto& [name, c] : corpus) {
    const auto cert = qc_certificate(c);
    const auto k = certified_constants(cert);
    const auto g = mesh_graph(c, m);
    const MeshHost host(g);
    const auto a = skeleton_approximation(c, g);
    const double shape = std::max(cert.M2, cert.M3);
    const double tl = tight_L(a, host);
    const double lmin = min_passing_L(a, host, k.K);
    std::printf("%-10s n=%5zu K=%3.0f shape=%.4f tightL=%.4f minL=%.4f minL/shape=%.4f\n", name.c_str(),
                c.vertex_count(), k.K, shape, tl, lmin, lmin / shape);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "skeleton") == 0) {
    skeleton_sweep(argc > 2 ? std::atoi(argv[2]) : 2);
    return 0;
  }
  triangle_sweep();
}
