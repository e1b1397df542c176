#pragma once

// Independent reference computations and random generators used by the tests.
// None of these call into the library routines they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "polyqs/finite_metric.hpp"

namespace oracle {

using polyqs::FiniteMetric;

inline FiniteMetric euclidean(const std::vector<std::vector<double>>& pts) {
  FiniteMetric m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      m.at(i, j) = std::sqrt(s);
    }
  return m;
}

inline std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& x : p) x = u(rng);
  return pts;
}

// Shortest-path metric of a random connected weighted graph.
inline FiniteMetric random_graph_metric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  FiniteMetric m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = i == j ? 0 : inf;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = std::size_t(u(rng) * i);
    m.at(i, j) = m.at(j, i) = w(rng);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) < 0.2) m.at(i, j) = m.at(j, i) = std::min(m(i, j), w(rng));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) = std::min(m(i, j), m(i, k) + m(k, j));
  return m;
}

// Gluing by all-pairs shortest paths on the union of d_Y and d_S edges.
inline FiniteMetric glue_floyd(const FiniteMetric& Y, const std::vector<int>& S, const FiniteMetric& dS) {
  FiniteMetric m = Y;
  const std::size_t n = Y.size();
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = 0; b < S.size(); ++b) m.at(S[a], S[b]) = std::min(m(S[a], S[b]), dS(a, b));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) = std::min(m(i, j), m(i, k) + m(k, j));
  return m;
}

// H(t) by definition: max image ratio over all triples with ratio <= t.
inline double profile_at(const std::vector<int>& f, const FiniteMetric& src, const FiniteMetric& dst, double t) {
  double best = 0;
  const std::size_t n = src.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z) {
        if (y == x || z == x) continue;
        if (src(x, y) / src(x, z) <= t) best = std::max(best, dst(f[x], f[y]) / dst(f[x], f[z]));
      }
  return best;
}

// Identity point map on n points.
inline std::vector<int> identity_map(std::size_t n) {
  std::vector<int> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = int(i);
  return f;
}

inline double relerr(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
