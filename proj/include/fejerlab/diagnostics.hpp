#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fejerlab/geometry.hpp"
#include "fejerlab/trace.hpp"

namespace fejerlab {

/// Finite sample standing in for the set M.
struct AnchorSet {
  std::vector<Vector> points;
  std::string label;

  Eigen::Index dim() const { return points.empty() ? 0 : points.front().size(); }
  void validate() const;
};

Json to_json(const AnchorSet& anchors);
/// Accepts {"label": ..., "points": [[...], ...]} or a bare list of points.
AnchorSet anchor_set_from_json(const Json& j, std::string default_label = "anchors");

/// The step p -> q does not move away from w:
///   |q - w| <= |p - w| + tol * (1 + |p - w|).
/// With tol == 0 the squared distances are compared in exact rational
/// arithmetic on the stored doubles, so equality cases are decided exactly.
bool distance_nonincreasing(const Vector& p, const Vector& q, const Vector& w, double tol);

/// |q - w|^2 - |p - w|^2 evaluated as <q - p, q + p - 2w> (no cancellation
/// between the two squared norms).
double squared_distance_change(const Vector& p, const Vector& q, const Vector& w);

struct FejerResult {
  Vector anchor;
  bool monotone = true;
  std::optional<std::size_t> first_violation;
};

/// Fejer monotonicity at every step, per anchor. Single-iterate traces have
/// no steps and pass vacuously.
std::vector<FejerResult> check_fejer(const Trace& trace, const AnchorSet& anchors, double tol);

/// Smallest N such that every step k >= N is nonincreasing for `anchor`;
/// absent when the last step itself increases the distance.
std::optional<std::size_t> fejer_star_index(const Trace& trace, const Vector& anchor, double tol);

std::vector<std::optional<std::size_t>> check_fejer_star(const Trace& trace, const AnchorSet& anchors,
                                                         double tol);

/// sum_i weights[i] * anchors.points[i]
Vector convex_combination(const AnchorSet& anchors, const Vector& weights);

struct HullSample {
  Vector weights;  // one per anchor, zero off the support
  Vector point;
  std::optional<std::size_t> fejer_star_N;
  /// max N over the support vertices; absent if any vertex is absent.
  std::optional<std::size_t> vertex_bound;
};

struct HullReport {
  std::vector<HullSample> samples;
  std::size_t absent_count = 0;
};

/// Fejer* check at `num_combinations` random convex combinations of the
/// anchors (random support, exponential weights), reproducible from `seed`.
HullReport check_fejer_star_convex_hull(const Trace& trace, const AnchorSet& anchors,
                                        std::size_t num_combinations, std::uint64_t seed, double tol);

/// d_k = |x^k - x|
std::vector<double> distance_sequence(const Trace& trace, const Vector& x);

/// s_k = <x1 - x2, x^k>
std::vector<double> inner_product_sequence(const Trace& trace, const Vector& x1, const Vector& x2);

/// max |s_{k+1} - s_k| over the last `window` steps. Requires
/// 1 <= window < sequence length.
double cauchy_tail_statistic(std::span<const double> sequence, std::size_t window);

enum class QuasiFejerType { I, II, III };

std::string_view to_string(QuasiFejerType t);

/// Tail-ratio threshold below which a fitted epsilon sequence is reported as
/// consistent with summability.
inline constexpr double kSummableTailRatio = 0.05;

struct EpsilonFit {
  std::vector<double> epsilons;
  double partial_sum = 0.0;
  /// Sum of the last quarter over the total (0 when the total is 0).
  double tail_ratio = 0.0;

  bool consistent_with_summable() const { return tail_ratio <= kSummableTailRatio; }
  std::string_view classification() const {
    return consistent_with_summable() ? "consistent with summable" : "inconclusive";
  }
};

EpsilonFit make_epsilon_fit(std::vector<double> epsilons);

struct QuasiFejerFit {
  QuasiFejerType type;
  /// One uniform fit for Types I and II; one fit per anchor for Type III.
  std::vector<EpsilonFit> fits;
};

/// Smallest nonnegative epsilons making the trace quasi-Fejer of the given
/// type over the anchors:
///   I    eps_k = max_x max(0, |x^{k+1}-x| - |x^k-x|)
///   II   eps_k = max_x max(0, |x^{k+1}-x|^2 - |x^k-x|^2)
///   III  the squared version per anchor.
QuasiFejerFit fit_quasi_fejer(const Trace& trace, const AnchorSet& anchors, QuasiFejerType type);

/// Type III certificate built from a Fejer* index N: eps_k is the (rounded
/// up) squared-distance increase for k < N and 0 from N on. Throws InvalidN
/// when some step k >= N moves away from x under `tol`.
std::vector<double> quasi_fejer3_witness(const Trace& trace, const Vector& x, std::size_t N,
                                         double tol = 0.0);

/// |x^{k+1}-x|^2 <= |x^k-x|^2 + eps_k at every step (exact when tol == 0,
/// otherwise with slack tol * (1 + |x^k-x|^2)).
bool type3_certificate_holds(const Trace& trace, const Vector& x, std::span<const double> epsilons,
                             double tol = 0.0);

struct AnchorMonotonicity {
  Vector anchor;
  bool fejer = true;
  std::optional<std::size_t> first_violation;
  std::optional<std::size_t> fejer_star_N;
  std::vector<double> type3_epsilons;
  double type3_partial_sum = 0.0;
};

struct MonotonicityReport {
  std::string label;
  double tol = 0.0;
  std::size_t trace_length = 0;
  std::vector<AnchorMonotonicity> per_point;
  EpsilonFit type1;
  EpsilonFit type2;
};

/// Runs every classifier over one anchor set. Type III epsilons are the
/// witness when N(x) exists and the plain fit otherwise.
MonotonicityReport analyze_monotonicity(const Trace& trace, const AnchorSet& anchors, double tol);

Json to_json(const MonotonicityReport& report);

struct Cluster {
  Vector representative;
  std::vector<std::size_t> members;  // trace indices
};

struct ClusterReport {
  std::vector<Cluster> clusters;
  bool is_convergent = false;
  std::optional<Vector> limit_estimate;
};

/// Greedy radius clustering of the last ceil(tail_fraction * length)
/// iterates, visited in trace order: a point joins the first cluster whose
/// representative is within `radius`, else it founds a new cluster.
ClusterReport cluster_points(const Trace& trace, double tail_fraction, double radius);

Json to_json(const ClusterReport& report);

struct HyperplaneCheck {
  double alpha = 0.0;
  double max_deviation = 0.0;
  bool passed = true;
};

/// Do all anchors lie on one hyperplane {y : <y, w1 - w2> = alpha}?
HyperplaneCheck check_cluster_hyperplane(const Vector& w1, const Vector& w2, const AnchorSet& anchors,
                                         double tol);

struct OrthogonalityCheck {
  double max_deviation = 0.0;
  bool passed = true;
};

/// max |<y - (w1 + w2)/2, w1 - w2>| over the anchors.
OrthogonalityCheck check_cluster_midpoint_orthogonality(const Vector& w1, const Vector& w2,
                                                        const AnchorSet& anchors, double tol);

struct StrongConvergenceCheck {
  bool holds = true;
  std::optional<std::size_t> first_violation;
};

/// |x^{k+1}-x|^2 <= |x^k-x|^2 - rho |x^{k+1}-x^k| + eps_k + tol for every step.
StrongConvergenceCheck check_strong_convergence_condition(const Trace& trace, const Vector& x,
                                                          double rho,
                                                          std::span<const double> epsilons,
                                                          double tol = 0.0);

/// Dimension of the affine hull of the anchors (rank of the differences to
/// the first point, with relative threshold tol).
Eigen::Index affine_dimension(const AnchorSet& anchors, double tol = 1e-10);

}  // namespace fejerlab
