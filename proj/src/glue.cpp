#include "polyqs/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyqs/errors.hpp"
#include "polyqs/parallel.hpp"

namespace polyqs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

namespace {

// One application of the gluing formula with base metric `base`.
FiniteMetric glue_pass(const FiniteMetric& base, const std::vector<int>& S, const std::vector<int>& pos,
                       const FiniteMetric& d_S) {
  const std::size_t n = base.size();
  const std::size_t s = S.size();
  // C[v][y] = d_Y(S_v, y); A[x][v] = min_u d_Y(x, S_u) + d_S(u, v).
  std::vector<double> C(s * n), A(n * s);
  for (std::size_t v = 0; v < s; ++v)
    for (std::size_t y = 0; y < n; ++y) C[v * n + y] = base(S[v], y);
  parallel_for(n, [&](std::size_t x) {
    double* row = &A[x * s];
    std::fill(row, row + s, kInf);
    for (std::size_t u = 0; u < s; ++u) {
      const double dxu = C[u * n + x];
      const double* su = &d_S.dist[u * s];
      for (std::size_t v = 0; v < s; ++v) row[v] = std::min(row[v], dxu + su[v]);
    }
  });

  FiniteMetric R = base;
  parallel_for(n, [&](std::size_t x) {
    std::vector<double> row(base.dist.begin() + x * n, base.dist.begin() + (x + 1) * n);
    for (std::size_t v = 0; v < s; ++v) {
      const double a = A[x * s + v];
      const double* cv = &C[v * n];
      for (std::size_t y = x + 1; y < n; ++y) row[y] = std::min(row[y], a + cv[y]);
    }
    for (std::size_t y = x + 1; y < n; ++y) R.at(x, y) = row[y];
  });
  // Clause (2) holds as an identity of the formula; the entries touching S are
  // set from its reduced forms so rounding in longer sums cannot undercut them.
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (pos[x] >= 0 && pos[y] >= 0) {
        R.at(x, y) = d_S(pos[x], pos[y]);
      } else if (pos[y] >= 0) {
        R.at(x, y) = A[x * s + pos[y]];
      } else if (pos[x] >= 0) {
        R.at(x, y) = A[y * s + pos[x]];
      }
      R.at(y, x) = R(x, y);
    }
    R.at(x, x) = 0;
  }
  return R;
}

}  // namespace

GluedMetric glue(const FiniteMetric& base, const std::vector<int>& S, const FiniteMetric& d_S,
                 double precondition_tol) {
  validate_matrix(base);
  validate_matrix(d_S);
  const std::size_t n = base.size();
  const std::size_t s = S.size();
  if (d_S.size() != s) throw InputError("d_S size does not match subset size");
  std::vector<int> pos(n, -1);
  for (std::size_t a = 0; a < s; ++a) {
    if (S[a] < 0 || std::size_t(S[a]) >= n) throw InputError("subset index out of range");
    if (pos[S[a]] >= 0) throw InputError("subset contains duplicates");
    pos[S[a]] = int(a);
  }
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) {
      if (d_S(a, b) > base(S[a], S[b]) + precondition_tol) {
        throw PreconditionError("d_S exceeds d_Y at subset pair (" + std::to_string(S[a]) + ", " +
                                std::to_string(S[b]) + ")");
      }
    }
  }

  GluedMetric g;
  g.base = base;
  g.subset = S;
  g.sub_metric = d_S;
  g.result = glue_pass(base, S, pos, d_S);
  // In exact arithmetic one pass is a fixed point. In floating point the sums
  // may associate differently on a second pass, so iterate until the result is
  // reproduced bit for bit; this makes regluing an exact no-op.
  for (int it = 0; it < 8; ++it) {
    FiniteMetric next = glue_pass(g.result, S, pos, d_S);
    if (next.dist == g.result.dist) break;
    g.result = std::move(next);
  }
  return g;
}

bool GlueReport::pass() const {
  return metric.ok && below_base.pass && on_subset.pass && mixed.pass && local_isometry.pass &&
         comparability.pass;
}

GlueReport verify_glue_clauses(const GluedMetric& g, double tol) {
  GlueReport rep;
  const FiniteMetric& Y = g.base;
  const FiniteMetric& D = g.result;
  const FiniteMetric& dS = g.sub_metric;
  const std::vector<int>& S = g.subset;
  const std::size_t n = Y.size();
  const std::size_t s = S.size();
  std::vector<int> pos(n, -1);
  for (std::size_t a = 0; a < s; ++a) pos[S[a]] = int(a);

  auto record = [](ClauseResult& c, double err, double limit, std::vector<int> w) {
    if (err > c.max_error) {
      c.max_error = err;
      if (err > limit) {
        c.pass = false;
        c.witness = std::move(w);
      }
    }
  };

  rep.metric = check_metric(D, tol);

  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) record(rep.below_base, D(x, y) - Y(x, y), tol, {int(x), int(y)});

  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      record(rep.on_subset, std::abs(D(S[a], S[b]) - dS(a, b)), tol, {S[a], S[b]});

  // Mixed case, cross-checked against the full two-index formula.
  for (std::size_t x = 0; x < n; ++x) {
    if (pos[x] >= 0) continue;
    for (std::size_t b = 0; b < s; ++b) {
      const int y = S[b];
      double single = kInf, full = Y(x, y);
      for (std::size_t a = 0; a < s; ++a) {
        single = std::min(single, Y(x, S[a]) + dS(a, b));
        for (std::size_t c = 0; c < s; ++c) full = std::min(full, Y(x, S[a]) + dS(a, c) + Y(S[c], y));
      }
      const double err = std::max(std::abs(D(x, y) - single), std::abs(D(x, y) - full));
      record(rep.mixed, err, tol, {int(x), y});
    }
  }

  // Clause (3): on B(x, r/3), r = dist(x, S \ {x}), d~ agrees with d_Y.
  for (std::size_t x = 0; x < n; ++x) {
    double r = kInf;
    for (int u : S)
      if (std::size_t(u) != x) r = std::min(r, D(x, u));
    if (!(r > 0)) continue;
    std::vector<int> ball;
    for (std::size_t y = 0; y < n; ++y)
      if (std::isinf(r) || in_ball(D(x, y), r / 3)) ball.push_back(int(y));
    for (int y : ball)
      for (int z : ball) record(rep.local_isometry, std::abs(D(y, z) - Y(y, z)), tol, {int(x), y, z});
  }

  // Clause (6) with the smallest admissible lambda.
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b)
      if (dS(a, b) > 0) rep.lambda = std::max(rep.lambda, Y(S[a], S[b]) / dS(a, b));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const double low = Y(x, y) / rep.lambda - D(x, y);
      const double high = D(x, y) - Y(x, y);
      record(rep.comparability, std::max(low, high), tol, {int(x), int(y)});
    }
  return rep;
}

}  // namespace polyqs
