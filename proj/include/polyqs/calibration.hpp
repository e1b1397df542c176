#pragma once

#include <algorithm>

// Empirical constants measured once with tools/calibrate and then frozen as
// regression bounds. Each curve sits above (or below, for angles) every value
// observed over dense random sweeps of the admissible inputs.

namespace polyqs::calibration {

// Bound on qc_certificate(triangle_complex(d)).M when max d_i / min d_i <= M.
// Observed: 7 (simplex count) up to M = 5, then about 0.11 M^2 from the apex
// triangles flattening.
inline double triangle_complex_qc(double M) { return std::max(7.0, 1.2 * M + 0.13 * M * M); }

// Lower bound on every angle of triangle_complex(d) for side ratio <= M.
// Observed: 0.90 at M = 1, decaying like 9 / M^2.
inline double triangle_complex_angle(double M) { return std::min(0.4 / M, 7.0 / (M * M)); }

}  // namespace polyqs::calibration

namespace polyqs::calibration {

// L for the skeleton approximation, keyed on the shape part s = max(M2, M3) of
// the certificate. Observed minimal passing L / s over grids, rectangles, tori,
// disks, snowsphere stages 0-2 and bumpy grids: at most 1.28 (disk), 1.155 on
// the flat grid (L = 2/sqrt 3) and the snowsphere (L = 2).
inline double skeleton_L(double s) { return 1.5 * s; }

}  // namespace polyqs::calibration
