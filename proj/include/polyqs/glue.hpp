#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polyqs/finite_metric.hpp"

namespace polyqs {

// d~(x,y) = min{ d_Y(x,y), min_{u,v in S} d_Y(x,u) + d_S(u,v) + d_Y(v,y) }.
struct GluedMetric {
  FiniteMetric base;            // d_Y
  std::vector<int> subset;      // S, as indices into base
  FiniteMetric sub_metric;      // d_S, indexed like `subset`
  FiniteMetric result;          // d~
};

// Throws PreconditionError (with the offending pair in the message) when
// d_S > d_Y + tol on S x S, and InputError for malformed input.
GluedMetric glue(const FiniteMetric& base, const std::vector<int>& S, const FiniteMetric& d_S,
                 double precondition_tol = 0.0);

struct ClauseResult {
  bool pass = true;
  double max_error = 0;
  std::vector<int> witness;
};

struct GlueReport {
  MetricCheck metric;           // clause (1)
  ClauseResult below_base;      // d~ <= d_Y everywhere
  ClauseResult on_subset;       // clause (2), x, y in S
  ClauseResult mixed;           // clause (2), x outside S, y in S
  ClauseResult local_isometry;  // clause (3) at sample scale
  ClauseResult comparability;   // clause (6)
  double lambda = 1;            // max d_Y / d_S over S pairs
  bool pass() const;
};

GlueReport verify_glue_clauses(const GluedMetric& g, double tol = kMetricTol);

}  // namespace polyqs
