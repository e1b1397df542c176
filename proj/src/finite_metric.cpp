#include "polyqs/finite_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polyqs/errors.hpp"
#include "polyqs/parallel.hpp"

namespace polyqs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

// Reduce (t, s) samples to the nondecreasing upper envelope.
std::vector<std::pair<double, double>> envelope(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> out;
  double best = -kInf;
  for (const auto& [t, s] : pts) {
    if (s <= best) continue;
    best = s;
    if (!out.empty() && out.back().first == t) {
      out.back().second = s;
    } else {
      out.emplace_back(t, s);
    }
  }
  return out;
}

void check_map(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst) {
  if (f.size() != src.size()) throw InputError("map size does not match source point count");
  for (int v : f) {
    if (v < 0 || static_cast<std::size_t>(v) >= dst.size()) throw InputError("map image out of range");
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Component labels of the subgraph induced by `inside`; -1 outside.
std::vector<int> components(const Adjacency& adj, const std::vector<char>& inside) {
  const std::size_t n = adj.size();
  std::vector<int> label(n, -1);
  std::vector<int> stack;
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!inside[s] || label[s] >= 0) continue;
    label[s] = next;
    stack.assign(1, static_cast<int>(s));
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u]) {
        if (inside[w] && label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace

FiniteMetric::FiniteMetric(std::size_t n) : points(default_ids(n)), dist(n * n, 0.0) {}

FiniteMetric::FiniteMetric(std::vector<std::string> ids, std::vector<double> matrix)
    : points(std::move(ids)), dist(std::move(matrix)) {
  validate_matrix(*this);
}

FiniteMetric FiniteMetric::restrict_to(const std::vector<int>& idx) const {
  FiniteMetric out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    out.points[a] = points.at(idx[a]);
    for (std::size_t b = 0; b < idx.size(); ++b) out.at(a, b) = (*this)(idx[a], idx[b]);
  }
  return out;
}

double FiniteMetric::diameter() const {
  double d = 0;
  for (double v : dist) d = std::max(d, v);
  return d;
}

double FiniteMetric::diameter(const std::vector<int>& subset) const {
  double d = 0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) d = std::max(d, (*this)(subset[a], subset[b]));
  return d;
}

FiniteMetric metric_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw InputError("distance matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return FiniteMetric(default_ids(n), std::move(flat));
}

void validate_matrix(const FiniteMetric& m) {
  const std::size_t n = m.points.size();
  if (m.dist.size() != n * n) throw InputError("distance matrix size does not match point count");
  for (double v : m.dist) {
    if (!std::isfinite(v) || v < 0) throw InputError("distance matrix entries must be finite and nonnegative");
  }
}

MetricCheck check_metric(const FiniteMetric& m, double tol) {
  MetricCheck res;
  const std::size_t n = m.size();
  auto fail = [&](const char* what, std::vector<int> w, double excess) {
    res.ok = false;
    res.violation = what;
    res.witness = std::move(w);
    res.excess = excess;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(m(i, i)) > tol) {
      fail("diagonal", {int(i)}, std::abs(m(i, i)));
      return res;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        fail("symmetry", {int(i), int(j)}, std::abs(m(i, j) - m(j, i)));
        return res;
      }
      if (m(i, j) <= 0) {
        fail("positivity", {int(i), int(j)}, -m(i, j));
        return res;
      }
    }
  }
  // Largest violation of d(i,k) <= d(i,j) + d(j,k).
  double worst = 0;
  std::vector<int> wit;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = m(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        const double ex = m(i, k) - (dij + m(j, k));
        if (ex > worst) {
          worst = ex;
          wit = {int(i), int(j), int(k)};
        }
      }
    }
  }
  if (worst > tol) fail("triangle", wit, worst);
  return res;
}

double DistortionProfile::operator()(double t) const {
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const std::pair<double, double>& s) { return v < s.first; });
  if (it == samples.begin()) return 0.0;
  return std::prev(it)->second;
}

DistortionProfile qs_profile(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                             std::uint64_t budget, std::uint64_t seed) {
  check_map(f, src, dst);
  const std::size_t n = src.size();
  DistortionProfile prof;
  prof.triple_budget = budget;
  prof.seed = seed;
  if (n < 3) throw InputError("qs_profile needs at least three points");

  auto ratio_pair = [&](std::size_t x, std::size_t y, std::size_t z) {
    const double t = src(x, y) / src(x, z);
    const double s = dst(f[x], f[y]) / dst(f[x], f[z]);
    return std::pair<double, double>(t, s);
  };

  if (n <= kExhaustiveTripleLimit) {
    prof.exhaustive = true;
    std::vector<std::vector<std::pair<double, double>>> per_x(n);
    parallel_for(n, [&](std::size_t x) {
      std::vector<std::pair<double, double>> pts;
      pts.reserve((n - 1) * (n - 1));
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        for (std::size_t z = 0; z < n; ++z) {
          if (z == x) continue;
          pts.push_back(ratio_pair(x, y, z));
        }
      }
      per_x[x] = envelope(std::move(pts));
    });
    std::vector<std::pair<double, double>> all;
    for (auto& v : per_x) all.insert(all.end(), v.begin(), v.end());
    prof.samples = envelope(std::move(all));
    prof.triples_evaluated = n * (n - 1) * (n - 1);
    return prof;
  }

  prof.exhaustive = false;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(budget);
  for (std::uint64_t k = 0; k < budget; ++k) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(k));
    const std::size_t x = h % n;
    h = splitmix64(h);
    const std::size_t y = h % n;
    h = splitmix64(h);
    const std::size_t z = h % n;
    if (x == y || x == z) continue;
    pts.push_back(ratio_pair(x, y, z));
  }
  prof.triples_evaluated = pts.size();
  prof.samples = envelope(std::move(pts));
  return prof;
}

double bilip_constant(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst) {
  check_map(f, src, dst);
  const std::size_t n = src.size();
  double lam = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = src(i, j);
      const double b = dst(f[i], f[j]);
      if (a == 0 || b == 0) throw InputError("bilip_constant: distinct points at distance zero");
      lam = std::max({lam, a / b, b / a});
    }
  }
  return lam;
}

DiamCheck check_diam_inequality(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                                const std::vector<int>& A, const std::vector<int>& B,
                                const DistortionFunction& eta) {
  check_map(f, src, dst);
  std::vector<int> sb(B.begin(), B.end());
  std::sort(sb.begin(), sb.end());
  for (int a : A) {
    if (!std::binary_search(sb.begin(), sb.end(), a)) throw InputError("A must be a subset of B");
  }
  auto image = [&](const std::vector<int>& s) {
    std::vector<int> out;
    for (int v : s) out.push_back(f[v]);
    return out;
  };
  DiamCheck c;
  c.diam_A = src.diameter(A);
  c.diam_B = src.diameter(B);
  c.diam_fA = dst.diameter(image(A));
  c.diam_fB = dst.diameter(image(B));
  if (!(c.diam_A > 0)) throw InputError("check_diam_inequality needs diam(A) > 0");
  c.lower = 1.0 / (2.0 * eta(c.diam_B / c.diam_A));
  c.upper = eta(2.0 * c.diam_A / c.diam_B);
  if (c.diam_fB > 0) {
    c.ratio = c.diam_fA / c.diam_fB;
  } else {
    c.ratio = c.diam_fA > 0 ? kInf : 0.0;
  }
  if (c.ratio < c.lower) {
    c.pass = false;
    c.failed = "lower";
  } else if (c.ratio > c.upper) {
    c.pass = false;
    c.failed = "upper";
  }
  return c;
}

double hausdorff_distance(const std::vector<int>& E, const std::vector<int>& F, const FiniteMetric& m) {
  if (E.empty() || F.empty()) throw InputError("hausdorff_distance needs nonempty sets");
  auto one_side = [&](const std::vector<int>& P, const std::vector<int>& Q) {
    double worst = 0;
    for (int p : P) {
      double best = kInf;
      for (int q : Q) best = std::min(best, m(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_side(E, F), one_side(F, E));
}

EpsIsometryCert eps_isometry_cert(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                                  double tol) {
  check_map(f, src, dst);
  EpsIsometryCert c;
  const std::size_t n = src.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double e = std::abs(src(i, j) - dst(f[i], f[j]));
      if (e > c.eps_distortion) {
        c.eps_distortion = e;
        c.distortion_witness = {int(i), int(j)};
      }
    }
  }
  for (std::size_t q = 0; q < dst.size(); ++q) {
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, dst(q, f[i]));
    if (c.density_witness < 0 || best > c.eps_density) {
      c.eps_density = best;
      c.density_witness = int(q);
    }
  }
  c.eps = std::max(c.eps_distortion + tol, c.eps_density + tol);
  c.gh_bound = 2.0 * c.eps;
  return c;
}

std::vector<BallSample> default_ball_samples(const FiniteMetric& m, int centers, int scales,
                                             std::uint64_t seed) {
  std::vector<BallSample> out;
  const std::size_t n = m.size();
  if (n == 0) return out;
  const double diam = m.diameter();
  for (int c = 0; c < centers; ++c) {
    const int x = int(splitmix64(seed + std::uint64_t(c)) % n);
    double r = diam > 0 ? diam / 2 : 1.0;
    for (int s = 0; s < scales; ++s, r /= 2) out.push_back({x, r});
  }
  return out;
}

DoublingReport doubling_constant(const FiniteMetric& m, const std::vector<BallSample>& samples) {
  DoublingReport rep;
  const std::size_t n = m.size();
  for (const auto& s : samples) {
    std::vector<int> ball;
    for (std::size_t j = 0; j < n; ++j)
      if (in_ball(m(s.center, j), s.radius)) ball.push_back(int(j));
    std::vector<char> covered(ball.size(), 0);
    std::vector<int> cover;
    for (std::size_t a = 0; a < ball.size(); ++a) {
      if (covered[a]) continue;
      cover.push_back(ball[a]);
      for (std::size_t b = a; b < ball.size(); ++b)
        if (!covered[b] && in_ball(m(ball[a], ball[b]), s.radius / 2)) covered[b] = 1;
    }
    if (double(cover.size()) > rep.M) {
      rep.M = double(cover.size());
      rep.witness = s;
      rep.cover_centers = cover;
    }
  }
  return rep;
}

LLCReport llc_check(const FiniteMetric& m, const Adjacency& adj, double M,
                    const std::vector<BallSample>& samples) {
  if (adj.size() != m.size()) throw InputError("adjacency size does not match point count");
  if (M < 1) throw InputError("LLC constant must be at least 1");
  LLCReport rep;
  const std::size_t n = m.size();
  {
    const auto lab = components(adj, std::vector<char>(n, 1));
    for (int l : lab)
      if (l != 0) throw InputError("llc_check needs a connected adjacency graph");
  }
  for (const auto& s : samples) {
    const int a = s.center;
    const double r = s.radius;
    // LLC1: points of B(a,r) are joined inside B(a,Mr).
    std::vector<char> big(n);
    for (std::size_t j = 0; j < n; ++j) big[j] = in_ball(m(a, j), M * r);
    auto lab = components(adj, big);
    int first = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_ball(m(a, j), r)) continue;
      if (first < 0) {
        first = int(j);
      } else if (lab[j] != lab[first]) {
        rep.pass = false;
        rep.failed = "LLC1";
        rep.ball = s;
        rep.pair = {first, int(j)};
        return rep;
      }
    }
    // LLC2: points outside B(a,r) are joined outside B(a,r/M).
    std::vector<char> far(n);
    for (std::size_t j = 0; j < n; ++j) far[j] = !in_ball(m(a, j), r / M);
    lab = components(adj, far);
    first = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_ball(m(a, j), r)) continue;
      if (first < 0) {
        first = int(j);
      } else if (lab[j] != lab[first]) {
        rep.pass = false;
        rep.failed = "LLC2";
        rep.ball = s;
        rep.pair = {first, int(j)};
        return rep;
      }
    }
  }
  return rep;
}

TurningReport bounded_turning_constant(const FiniteMetric& m, const Adjacency& adj,
                                       std::size_t pair_budget, std::uint64_t seed) {
  if (adj.size() != m.size()) throw InputError("adjacency size does not match point count");
  const std::size_t n = m.size();
  TurningReport rep;
  std::vector<std::pair<int, int>> pairs;
  const std::size_t total = n * (n - (n > 0)) / 2;
  if (total <= pair_budget) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(int(i), int(j));
  } else {
    for (std::size_t k = 0; k < pair_budget; ++k) {
      std::uint64_t h = splitmix64(seed ^ splitmix64(k));
      int i = int(h % n);
      int j = int(splitmix64(h) % n);
      if (i == j) continue;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  rep.pairs_evaluated = pairs.size();

  std::vector<double> ratio(pairs.size(), 1.0);
  std::vector<std::vector<int>> sets(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [x, y] = pairs[p];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> key(n);
    for (std::size_t z = 0; z < n; ++z) key[z] = m(x, z) + m(z, y);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    UnionFind uf(n);
    std::vector<char> added(n, 0);
    bool joined = false;
    for (int z : order) {
      added[z] = 1;
      for (int w : adj[z])
        if (added[w]) uf.unite(z, w);
      if (added[x] && added[y] && uf.find(x) == uf.find(y)) {
        joined = true;
        break;
      }
    }
    if (!joined) {
      ratio[p] = kInf;
      return;
    }
    std::vector<int> comp;
    const int root = uf.find(x);
    for (std::size_t z = 0; z < n; ++z)
      if (added[z] && uf.find(int(z)) == root) comp.push_back(int(z));
    ratio[p] = m.diameter(comp) / m(x, y);
    sets[p] = std::move(comp);
  });
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (ratio[p] > rep.L) {
      rep.L = ratio[p];
      rep.pair = pairs[p];
      rep.connecting_set = sets[p];
    }
  }
  return rep;
}

}  // namespace polyqs
