#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace polyqs {

// Tolerance used for metric axioms and ball membership throughout the library.
inline constexpr double kMetricTol = 1e-9;

// A finite point set with a symmetric distance matrix (row-major).
struct FiniteMetric {
  std::vector<std::string> points;
  std::vector<double> dist;

  FiniteMetric() = default;
  explicit FiniteMetric(std::size_t n);  // ids "0".."n-1", zero matrix
  FiniteMetric(std::vector<std::string> ids, std::vector<double> matrix);

  std::size_t size() const { return points.size(); }
  double operator()(std::size_t i, std::size_t j) const { return dist[i * points.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return dist[i * points.size() + j]; }

  // Sub-metric on the listed indices, in the listed order.
  FiniteMetric restrict_to(const std::vector<int>& idx) const;
  double diameter() const;
  double diameter(const std::vector<int>& subset) const;
};

FiniteMetric metric_from_rows(const std::vector<std::vector<double>>& rows);

// Shape and value checks (square, finite, nonnegative). Throws InputError.
void validate_matrix(const FiniteMetric& m);

struct MetricCheck {
  bool ok = true;
  std::string violation;           // "diagonal", "symmetry", "positivity", "triangle"
  std::vector<int> witness;        // offending indices
  double excess = 0.0;             // size of the violation
};

MetricCheck check_metric(const FiniteMetric& m, double tol = kMetricTol);

// Maps are index vectors: f[i] is the image in the target of source point i.
using PointMap = std::vector<int>;

// Empirical distortion function. samples is the upper envelope: sorted by t,
// H nondecreasing, and only the points where H increases are kept, so
// H(t) = max{H_i : t_i <= t}.
struct DistortionProfile {
  std::vector<std::pair<double, double>> samples;
  std::uint64_t triple_budget = 0;
  std::uint64_t seed = 0;
  std::uint64_t triples_evaluated = 0;
  bool exhaustive = true;

  double operator()(double t) const;
};

// Exhaustive over ordered triples for n <= 300, otherwise `budget` seeded
// random triples.
DistortionProfile qs_profile(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                             std::uint64_t budget, std::uint64_t seed);

inline constexpr std::size_t kExhaustiveTripleLimit = 300;

double bilip_constant(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst);

using DistortionFunction = std::function<double(double)>;

struct DiamCheck {
  bool pass = true;
  std::string failed;              // "lower" or "upper"
  double diam_A = 0, diam_B = 0, diam_fA = 0, diam_fB = 0;
  double ratio = 0;                // diam f(A) / diam f(B)
  double lower = 0, upper = 0;     // 1/(2 eta(diamB/diamA)) and eta(2 diamA/diamB)
};

DiamCheck check_diam_inequality(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                                const std::vector<int>& A, const std::vector<int>& B,
                                const DistortionFunction& eta);

double hausdorff_distance(const std::vector<int>& E, const std::vector<int>& F, const FiniteMetric& m);

struct EpsIsometryCert {
  double eps_distortion = 0;
  double eps_density = 0;
  double eps = 0;                  // strict bound for both clauses
  double gh_bound = 0;             // Gromov-Hausdorff distance is below this
  std::pair<int, int> distortion_witness{-1, -1};
  int density_witness = -1;
};

EpsIsometryCert eps_isometry_cert(const PointMap& f, const FiniteMetric& src, const FiniteMetric& dst,
                                  double tol = 1e-12);

using Adjacency = std::vector<std::vector<int>>;

struct BallSample {
  int center;
  double radius;
};

// Centers chosen by seed, radii on a dyadic grid below the diameter.
std::vector<BallSample> default_ball_samples(const FiniteMetric& m, int centers, int scales,
                                             std::uint64_t seed);

struct DoublingReport {
  double M = 0;
  BallSample witness{-1, 0};
  std::vector<int> cover_centers;
};

DoublingReport doubling_constant(const FiniteMetric& m, const std::vector<BallSample>& samples);

struct LLCReport {
  bool pass = true;
  std::string failed;              // "LLC1" or "LLC2"
  BallSample ball{-1, 0};
  std::pair<int, int> pair{-1, -1};
};

LLCReport llc_check(const FiniteMetric& m, const Adjacency& adj, double M,
                    const std::vector<BallSample>& samples);

struct TurningReport {
  double L = 1;
  std::pair<int, int> pair{-1, -1};
  std::vector<int> connecting_set;
  std::size_t pairs_evaluated = 0;
};

// Exhaustive over pairs when n(n-1)/2 <= pair_budget, else seeded sampling.
TurningReport bounded_turning_constant(const FiniteMetric& m, const Adjacency& adj,
                                       std::size_t pair_budget = 5000, std::uint64_t seed = 0);

// Closed ball with the library tolerance.
inline bool in_ball(double d, double r) { return d <= r + kMetricTol; }

}  // namespace polyqs
