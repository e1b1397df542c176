#pragma once

#include <cmath>
#include <vector>

#include "polyqs/modulus.hpp"

// Curve families for the analytic modulus fixtures, shared by the unit and
// acceptance suites.
namespace fixture {

inline const double kPi = 3.14159265358979323846;

// Nodes whose coordinate `axis` equals `at` (to rounding).
inline std::vector<int> side(const polyqs::MeshGraph& g, int axis, double at) {
  std::vector<int> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (std::abs(g.position[v][axis] - at) < 1e-9) out.push_back(int(v));
  return out;
}

inline polyqs::CurveFamily crossing(const polyqs::MeshGraph& g, int axis, double length) {
  return {side(g, axis, 0), side(g, axis, length), {}};
}

// Inner and outer boundary polygons of annulus_disk(1, e, segments, rings),
// found from the projection onto the normal of each polygon side.
inline polyqs::CurveFamily round_annulus(const polyqs::MeshGraph& g, int segments) {
  const double sec = 2 * kPi / segments, e = std::exp(1.0);
  polyqs::CurveFamily fam;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double x = g.position[v][0], y = g.position[v][1];
    double th = std::atan2(y, x);
    if (th < 0) th += 2 * kPi;
    const double mid = (std::floor(th / sec) + 0.5) * sec;
    const double proj = std::hypot(x, y) * std::cos(th - mid);
    if (proj <= std::cos(sec / 2) + 1e-9) fam.E.push_back(int(v));
    else if (proj >= e * std::cos(sec / 2) - 1e-9) fam.F.push_back(int(v));
  }
  return fam;
}

}  // namespace fixture
