#include "fejerlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "exact.hpp"
#include "fejerlab/error.hpp"
#include "json_util.hpp"

namespace fejerlab {

namespace {

void require_trace(const Trace& trace) {
  trace.validate();
}

void require_compatible(const Trace& trace, const Vector& x) {
  require_finite(x, "anchor");
  require_dim(x, trace.dim(), "anchor");
}

void require_compatible(const Trace& trace, const AnchorSet& anchors) {
  anchors.validate();
  if (anchors.dim() != trace.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "anchor set and trace differ in dimension");
  }
}

Json optional_index(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

Json epsilon_fit_to_json(const EpsilonFit& fit) {
  return Json{{"epsilons", fit.epsilons},
              {"partial_sum", fit.partial_sum},
              {"tail_ratio_estimate", fit.tail_ratio},
              {"classification", std::string(fit.classification())}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Anchor sets

void AnchorSet::validate() const {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "anchor set '" + label + "' is empty");
  const auto n = points.front().size();
  for (const auto& p : points) {
    require_finite(p, "anchor");
    require_dim(p, n, "anchor");
  }
}

Json to_json(const AnchorSet& anchors) {
  Json points = Json::array();
  for (const auto& p : anchors.points) points.push_back(vector_to_json(p));
  return Json{{"label", anchors.label}, {"points", points}};
}

AnchorSet anchor_set_from_json(const Json& j, std::string default_label) {
  AnchorSet anchors;
  anchors.label = std::move(default_label);
  const Json* points = &j;
  if (j.is_object()) {
    if (j.contains("label")) anchors.label = detail::get_string(j, "label");
    points = &detail::field(j, "points");
  }
  if (!points->is_array()) throw Error(ErrorCode::Parse, "anchor points must be an array");
  for (const auto& p : *points) anchors.points.push_back(vector_from_json(p));
  anchors.validate();
  return anchors;
}

// ---------------------------------------------------------------------------
// Step predicates

double squared_distance_change(const Vector& p, const Vector& q, const Vector& w) {
  return (q - p).dot(q + p - 2.0 * w);
}

bool distance_nonincreasing(const Vector& p, const Vector& q, const Vector& w, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  if (tol == 0.0) return exact::squared_distance_change_sign(p, q, w) <= 0;
  const double before = (p - w).norm();
  const double after = (q - w).norm();
  const double denom = before + after;
  const double increase = denom > 0.0 ? squared_distance_change(p, q, w) / denom : 0.0;
  return increase <= tol * (1.0 + before);
}

// ---------------------------------------------------------------------------
// Fejer and Fejer*

std::vector<FejerResult> check_fejer(const Trace& trace, const AnchorSet& anchors, double tol) {
  require_trace(trace);
  require_compatible(trace, anchors);
  std::vector<FejerResult> results;
  results.reserve(anchors.points.size());
  for (const auto& a : anchors.points) {
    FejerResult r{a, true, std::nullopt};
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
      if (!distance_nonincreasing(trace.iterates[k], trace.iterates[k + 1], a, tol)) {
        r.monotone = false;
        r.first_violation = k;
        break;
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::optional<std::size_t> fejer_star_index(const Trace& trace, const Vector& anchor, double tol) {
  require_trace(trace);
  require_compatible(trace, anchor);
  const std::size_t steps = trace.size() - 1;
  for (std::size_t k = steps; k-- > 0;) {
    if (!distance_nonincreasing(trace.iterates[k], trace.iterates[k + 1], anchor, tol)) {
      if (k + 1 == steps) return std::nullopt;
      return k + 1;
    }
  }
  return 0;
}

std::vector<std::optional<std::size_t>> check_fejer_star(const Trace& trace, const AnchorSet& anchors,
                                                         double tol) {
  require_compatible(trace, anchors);
  std::vector<std::optional<std::size_t>> out;
  out.reserve(anchors.points.size());
  for (const auto& a : anchors.points) out.push_back(fejer_star_index(trace, a, tol));
  return out;
}

Vector convex_combination(const AnchorSet& anchors, const Vector& weights) {
  anchors.validate();
  if (static_cast<std::size_t>(weights.size()) != anchors.points.size()) {
    throw Error(ErrorCode::LengthMismatch, "one weight per anchor required");
  }
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "weights must be convex coefficients");
  }
  Vector point = Vector::Zero(anchors.dim());
  for (std::size_t i = 0; i < anchors.points.size(); ++i) {
    if (weights[static_cast<Eigen::Index>(i)] == 1.0) return anchors.points[i];
    point += weights[static_cast<Eigen::Index>(i)] * anchors.points[i];
  }
  return point;
}

HullReport check_fejer_star_convex_hull(const Trace& trace, const AnchorSet& anchors,
                                        std::size_t num_combinations, std::uint64_t seed, double tol) {
  if (num_combinations < 1) throw Error(ErrorCode::InvalidArgument, "num_combinations must be >= 1");
  require_trace(trace);
  require_compatible(trace, anchors);

  const auto vertex_N = check_fejer_star(trace, anchors, tol);
  const std::size_t m = anchors.points.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> support_size(1, m);
  std::exponential_distribution<double> exponential(1.0);

  HullReport report;
  std::vector<std::size_t> order(m);
  for (std::size_t n = 0; n < num_combinations; ++n) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t s = support_size(rng);

    Vector weights = Vector::Zero(static_cast<Eigen::Index>(m));
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      const double w = exponential(rng);
      weights[static_cast<Eigen::Index>(order[i])] = w;
      total += w;
    }
    weights /= total;

    HullSample sample;
    sample.point = Vector::Zero(anchors.dim());
    for (std::size_t i = 0; i < m; ++i) sample.point += weights[static_cast<Eigen::Index>(i)] * anchors.points[i];
    sample.weights = std::move(weights);
    sample.fejer_star_N = fejer_star_index(trace, sample.point, tol);

    std::optional<std::size_t> bound = 0;
    for (std::size_t i = 0; i < s && bound; ++i) {
      const auto& v = vertex_N[order[i]];
      bound = v ? std::optional<std::size_t>(std::max(*bound, *v)) : std::nullopt;
    }
    sample.vertex_bound = bound;
    if (!sample.fejer_star_N) ++report.absent_count;
    report.samples.push_back(std::move(sample));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Scalar sequences

std::vector<double> distance_sequence(const Trace& trace, const Vector& x) {
  require_trace(trace);
  require_compatible(trace, x);
  std::vector<double> d;
  d.reserve(trace.size());
  for (const auto& xk : trace.iterates) d.push_back((xk - x).norm());
  return d;
}

std::vector<double> inner_product_sequence(const Trace& trace, const Vector& x1, const Vector& x2) {
  require_trace(trace);
  require_compatible(trace, x1);
  require_compatible(trace, x2);
  const Vector direction = x1 - x2;
  std::vector<double> s;
  s.reserve(trace.size());
  for (const auto& xk : trace.iterates) s.push_back(direction.dot(xk));
  return s;
}

double cauchy_tail_statistic(std::span<const double> sequence, std::size_t window) {
  if (window < 1 || window >= sequence.size()) {
    throw Error(ErrorCode::InvalidArgument, "window must satisfy 1 <= window < sequence length");
  }
  double stat = 0.0;
  for (std::size_t k = sequence.size() - 1 - window; k + 1 < sequence.size(); ++k) {
    stat = std::max(stat, std::abs(sequence[k + 1] - sequence[k]));
  }
  return stat;
}

// ---------------------------------------------------------------------------
// Quasi-Fejer

std::string_view to_string(QuasiFejerType t) {
  switch (t) {
    case QuasiFejerType::I: return "I";
    case QuasiFejerType::II: return "II";
    case QuasiFejerType::III: return "III";
  }
  return "?";
}

EpsilonFit make_epsilon_fit(std::vector<double> epsilons) {
  EpsilonFit fit;
  fit.epsilons = std::move(epsilons);
  const std::size_t m = fit.epsilons.size();
  fit.partial_sum = std::accumulate(fit.epsilons.begin(), fit.epsilons.end(), 0.0);
  if (m == 0 || !(fit.partial_sum > 0.0)) return fit;
  const std::size_t quarter = (m + 3) / 4;
  const double tail = std::accumulate(fit.epsilons.end() - static_cast<std::ptrdiff_t>(quarter),
                                      fit.epsilons.end(), 0.0);
  fit.tail_ratio = tail / fit.partial_sum;
  return fit;
}

QuasiFejerFit fit_quasi_fejer(const Trace& trace, const AnchorSet& anchors, QuasiFejerType type) {
  require_trace(trace);
  require_compatible(trace, anchors);
  const std::size_t steps = trace.size() - 1;

  auto increase = [&](std::size_t k, const Vector& a) {
    const Vector& p = trace.iterates[k];
    const Vector& q = trace.iterates[k + 1];
    const double sq = squared_distance_change(p, q, a);
    if (type != QuasiFejerType::I) return std::max(0.0, sq);
    const double denom = (p - a).norm() + (q - a).norm();
    return denom > 0.0 ? std::max(0.0, sq / denom) : 0.0;
  };

  QuasiFejerFit out{type, {}};
  if (type == QuasiFejerType::III) {
    for (const auto& a : anchors.points) {
      std::vector<double> eps(steps);
      for (std::size_t k = 0; k < steps; ++k) eps[k] = increase(k, a);
      out.fits.push_back(make_epsilon_fit(std::move(eps)));
    }
    return out;
  }
  std::vector<double> eps(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    for (const auto& a : anchors.points) eps[k] = std::max(eps[k], increase(k, a));
  }
  out.fits.push_back(make_epsilon_fit(std::move(eps)));
  return out;
}

std::vector<double> quasi_fejer3_witness(const Trace& trace, const Vector& x, std::size_t N, double tol) {
  require_trace(trace);
  require_compatible(trace, x);
  const std::size_t steps = trace.size() - 1;
  std::vector<double> eps(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector& p = trace.iterates[k];
    const Vector& q = trace.iterates[k + 1];
    if (k >= N) {
      if (!distance_nonincreasing(p, q, x, tol)) {
        throw Error(ErrorCode::InvalidN, "distance increases at step " + std::to_string(k) +
                                             " >= N = " + std::to_string(N));
      }
      continue;
    }
    const mpq_class change = exact::squared_distance_change(p, q, x);
    if (sgn(change) > 0) eps[k] = exact::round_up(change);
  }
  return eps;
}

bool type3_certificate_holds(const Trace& trace, const Vector& x, std::span<const double> epsilons,
                             double tol) {
  require_trace(trace);
  require_compatible(trace, x);
  const std::size_t steps = trace.size() - 1;
  if (epsilons.size() < steps) throw Error(ErrorCode::LengthMismatch, "one epsilon per step required");
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector& p = trace.iterates[k];
    const Vector& q = trace.iterates[k + 1];
    if (!(epsilons[k] >= 0.0)) return false;
    if (tol == 0.0) {
      if (exact::squared_distance_change(p, q, x) > mpq_class(epsilons[k])) return false;
    } else if (squared_distance_change(p, q, x) > epsilons[k] + tol * (1.0 + (p - x).squaredNorm())) {
      return false;
    }
  }
  return true;
}

MonotonicityReport analyze_monotonicity(const Trace& trace, const AnchorSet& anchors, double tol) {
  require_trace(trace);
  require_compatible(trace, anchors);
  MonotonicityReport report;
  report.label = anchors.label;
  report.tol = tol;
  report.trace_length = trace.size();

  const auto fejer = check_fejer(trace, anchors, tol);
  const auto type3 = fit_quasi_fejer(trace, anchors, QuasiFejerType::III);
  for (std::size_t i = 0; i < anchors.points.size(); ++i) {
    AnchorMonotonicity entry;
    entry.anchor = anchors.points[i];
    entry.fejer = fejer[i].monotone;
    entry.first_violation = fejer[i].first_violation;
    entry.fejer_star_N = entry.fejer ? std::optional<std::size_t>(0)
                                     : fejer_star_index(trace, entry.anchor, tol);
    if (entry.fejer_star_N) {
      entry.type3_epsilons = quasi_fejer3_witness(trace, entry.anchor, *entry.fejer_star_N, tol);
    } else {
      entry.type3_epsilons = type3.fits[i].epsilons;
    }
    entry.type3_partial_sum =
        std::accumulate(entry.type3_epsilons.begin(), entry.type3_epsilons.end(), 0.0);
    report.per_point.push_back(std::move(entry));
  }
  report.type1 = fit_quasi_fejer(trace, anchors, QuasiFejerType::I).fits.front();
  report.type2 = fit_quasi_fejer(trace, anchors, QuasiFejerType::II).fits.front();
  return report;
}

Json to_json(const MonotonicityReport& report) {
  Json per_point = Json::array();
  for (const auto& e : report.per_point) {
    per_point.push_back(Json{{"anchor", vector_to_json(e.anchor)},
                             {"fejer", e.fejer},
                             {"first_violation_index", optional_index(e.first_violation)},
                             {"fejer_star_N", optional_index(e.fejer_star_N)},
                             {"type3_epsilons", e.type3_epsilons},
                             {"type3_partial_sum", e.type3_partial_sum}});
  }
  return Json{{"anchor_set", report.label},
              {"tol", report.tol},
              {"trace_length", report.trace_length},
              {"per_point", per_point},
              {"uniform", Json{{"type1", epsilon_fit_to_json(report.type1)},
                               {"type2", epsilon_fit_to_json(report.type2)}}}};
}

// ---------------------------------------------------------------------------
// Cluster geometry

ClusterReport cluster_points(const Trace& trace, double tail_fraction, double radius) {
  require_trace(trace);
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail_fraction must lie in (0,1]");
  }
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");

  const std::size_t n = trace.size();
  const auto tail = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  ClusterReport report;
  for (std::size_t k = n - tail; k < n; ++k) {
    const Vector& x = trace.iterates[k];
    auto home = std::find_if(report.clusters.begin(), report.clusters.end(),
                             [&](const Cluster& c) { return (c.representative - x).norm() <= radius; });
    if (home == report.clusters.end()) {
      report.clusters.push_back(Cluster{x, {k}});
    } else {
      home->members.push_back(k);
    }
  }
  report.is_convergent = report.clusters.size() == 1;
  if (report.is_convergent) {
    // mean as representative + mean offset, exact for a constant tail
    const Cluster& c = report.clusters.front();
    Vector offset = Vector::Zero(trace.dim());
    for (auto k : c.members) offset += trace.iterates[k] - c.representative;
    report.limit_estimate = c.representative + offset / static_cast<double>(c.members.size());
  }
  return report;
}

Json to_json(const ClusterReport& report) {
  Json clusters = Json::array();
  for (const auto& c : report.clusters) {
    clusters.push_back(Json{{"representative", vector_to_json(c.representative)},
                            {"member_indices", c.members}});
  }
  return Json{{"clusters", clusters},
              {"is_convergent", report.is_convergent},
              {"limit_estimate",
               report.limit_estimate ? vector_to_json(*report.limit_estimate) : Json(nullptr)}};
}

namespace {

void require_cluster_pair(const Vector& w1, const Vector& w2, const AnchorSet& anchors, double tol) {
  anchors.validate();
  require_finite(w1, "cluster point");
  require_finite(w2, "cluster point");
  require_dim(w1, anchors.dim(), "cluster point");
  require_dim(w2, anchors.dim(), "cluster point");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  if ((w1 - w2).norm() <= tol) {
    throw Error(ErrorCode::DegenerateClusterPair, "cluster points coincide within tolerance");
  }
}

}  // namespace

HyperplaneCheck check_cluster_hyperplane(const Vector& w1, const Vector& w2, const AnchorSet& anchors,
                                         double tol) {
  require_cluster_pair(w1, w2, anchors, tol);
  const Vector direction = w1 - w2;
  std::vector<double> values;
  values.reserve(anchors.points.size());
  for (const auto& y : anchors.points) values.push_back(y.dot(direction));
  HyperplaneCheck check;
  check.alpha = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  for (double v : values) check.max_deviation = std::max(check.max_deviation, std::abs(v - check.alpha));
  check.passed = check.max_deviation <= tol * (1.0 + std::abs(check.alpha));
  return check;
}

OrthogonalityCheck check_cluster_midpoint_orthogonality(const Vector& w1, const Vector& w2,
                                                        const AnchorSet& anchors, double tol) {
  require_cluster_pair(w1, w2, anchors, tol);
  const Vector direction = w1 - w2;
  const Vector midpoint = 0.5 * (w1 + w2);
  OrthogonalityCheck check;
  for (const auto& y : anchors.points) {
    check.max_deviation = std::max(check.max_deviation, std::abs((y - midpoint).dot(direction)));
  }
  check.passed = check.max_deviation <= tol * (1.0 + direction.squaredNorm());
  return check;
}

StrongConvergenceCheck check_strong_convergence_condition(const Trace& trace, const Vector& x,
                                                          double rho, std::span<const double> epsilons,
                                                          double tol) {
  require_trace(trace);
  require_compatible(trace, x);
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const std::size_t steps = trace.size() - 1;
  if (epsilons.size() < steps) throw Error(ErrorCode::LengthMismatch, "one epsilon per step required");
  StrongConvergenceCheck check;
  for (std::size_t k = 0; k < steps; ++k) {
    if (!(epsilons[k] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilons must be nonnegative");
    const Vector& p = trace.iterates[k];
    const Vector& q = trace.iterates[k + 1];
    const double lhs = (q - x).squaredNorm();
    const double rhs = (p - x).squaredNorm() - rho * (q - p).norm() + epsilons[k] + tol;
    if (lhs > rhs) {
      check.holds = false;
      check.first_violation = k;
      break;
    }
  }
  return check;
}

Eigen::Index affine_dimension(const AnchorSet& anchors, double tol) {
  anchors.validate();
  if (anchors.points.size() == 1) return 0;
  Matrix differences(anchors.dim(), static_cast<Eigen::Index>(anchors.points.size() - 1));
  for (std::size_t i = 1; i < anchors.points.size(); ++i) {
    differences.col(static_cast<Eigen::Index>(i - 1)) = anchors.points[i] - anchors.points[0];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(differences);
  qr.setThreshold(tol);
  return qr.rank();
}

}  // namespace fejerlab
