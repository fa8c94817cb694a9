#include "fejerlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fejerlab/error.hpp"
#include "json_util.hpp"

namespace fejerlab {

double relative_tol(const Vector& x, double base) { return base * (1.0 + x.norm()); }

void require_finite(const Vector& v, std::string_view what) {
  if (v.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must have dimension >= 1");
  }
  if (!v.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has a non-finite component");
  }
}

void require_dim(const Vector& v, Eigen::Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(dim));
  }
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Parse, "expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  require_finite(v, "vector");
  return v;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Convex function oracles

ConvexFn ball_constraint(const Vector& center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "ball radius must be positive and finite");
  }
  const double r2 = radius * radius;
  ConvexFn fn;
  fn.dim = center.size();
  fn.value = [center, r2](const Vector& y) { return (y - center).squaredNorm() - r2; };
  fn.subgradient = [center](const Vector& y) -> Vector { return 2.0 * (y - center); };
  fn.descriptor = Json{{"oracle", "ball"}, {"center", vector_to_json(center)}, {"radius", radius}};
  return fn;
}

ConvexFn affine_constraint(const Vector& normal, double offset) {
  require_finite(normal, "affine normal");
  if (!std::isfinite(offset)) throw Error(ErrorCode::InvalidArgument, "affine offset not finite");
  ConvexFn fn;
  fn.dim = normal.size();
  fn.value = [normal, offset](const Vector& y) { return normal.dot(y) - offset; };
  fn.subgradient = [normal](const Vector&) -> Vector { return normal; };
  fn.descriptor = Json{{"oracle", "affine"}, {"normal", vector_to_json(normal)}, {"offset", offset}};
  return fn;
}

ConvexFn shifted(const ConvexFn& fn, double shift) {
  ConvexFn out;
  out.dim = fn.dim;
  out.value = [inner = fn.value, shift](const Vector& y) { return inner(y) + shift; };
  out.subgradient = fn.subgradient;
  if (!fn.descriptor.is_null()) {
    out.descriptor = fn.descriptor;
    out.descriptor["shift"] = out.descriptor.value("shift", 0.0) + shift;
  }
  return out;
}

ConvexFn convex_fn_from_json(const Json& j) {
  const std::string family = detail::get_string(j, "oracle");
  ConvexFn fn;
  if (family == "ball") {
    fn = ball_constraint(vector_from_json(detail::field(j, "center")),
                         detail::get_number(j, "radius"));
  } else if (family == "affine") {
    fn = affine_constraint(vector_from_json(detail::field(j, "normal")),
                           detail::get_number(j, "offset"));
  } else {
    throw Error(ErrorCode::Parse, "unknown oracle family '" + family + "'");
  }
  if (j.contains("shift")) fn = shifted(fn, detail::get_number(j, "shift"));
  return fn;
}

Json to_json(const ConvexFn& fn) {
  if (fn.descriptor.is_null()) {
    throw Error(ErrorCode::NotSerializable, "ad-hoc convex function oracles cannot be serialized");
  }
  return fn.descriptor;
}

OracleCheck verify_convex_fn(const ConvexFn& fn, std::span<const Vector> points,
                             std::size_t num_pairs, std::uint64_t seed, double tol) {
  if (points.empty() || num_pairs == 0) {
    throw Error(ErrorCode::EmptySample, "convexity check needs sample points");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  OracleCheck report;
  report.worst_convexity_slack = std::numeric_limits<double>::infinity();
  report.worst_subgradient_slack = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < num_pairs; ++n) {
    const Vector& x = points[pick(rng)];
    const Vector& y = points[pick(rng)];
    require_dim(x, fn.dim, "sample point");
    require_dim(y, fn.dim, "sample point");
    const double t = unit(rng);
    const Vector mid = t * x + (1.0 - t) * y;
    const double fx = fn.value(x);
    const double fy = fn.value(y);
    const double convexity = t * fx + (1.0 - t) * fy - fn.value(mid);
    const double subgradient = fy - fx - fn.subgradient(x).dot(y - x);
    report.worst_convexity_slack = std::min(report.worst_convexity_slack, convexity);
    report.worst_subgradient_slack = std::min(report.worst_subgradient_slack, subgradient);
    ++report.pairs;
  }
  report.passed = report.worst_convexity_slack >= -tol && report.worst_subgradient_slack >= -tol;
  return report;
}

// ---------------------------------------------------------------------------
// Sets

namespace {

void require_normal(const Vector& normal, double offset) {
  require_finite(normal, "normal");
  if (!(normal.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "normal must be nonzero");
  if (!std::isfinite(offset)) throw Error(ErrorCode::InvalidArgument, "offset must be finite");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  require_normal(normal, offset);
  const auto dim = normal.size();
  return ConvexSet(Halfspace{std::move(normal), offset}, dim);
}

ConvexSet ConvexSet::hyperplane(Vector normal, double offset) {
  require_normal(normal, offset);
  const auto dim = normal.size();
  return ConvexSet(Hyperplane{std::move(normal), offset}, dim);
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "ball radius must be positive and finite");
  }
  const auto dim = center.size();
  return ConvexSet(Ball{std::move(center), radius}, dim);
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  require_finite(lower, "box lower");
  require_finite(upper, "box upper");
  require_dim(upper, lower.size(), "box upper");
  if ((lower.array() > upper.array()).any()) {
    throw Error(ErrorCode::InvalidArgument, "box requires lower <= upper componentwise");
  }
  const auto dim = lower.size();
  return ConvexSet(Box{std::move(lower), std::move(upper)}, dim);
}

ConvexSet ConvexSet::sublevel(ConvexFn fn) {
  if (!fn.value || !fn.subgradient || fn.dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "sublevel set needs a complete oracle");
  }
  const auto dim = fn.dim;
  return ConvexSet(Sublevel{std::move(fn)}, dim);
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "intersection needs members");
  const auto dim = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "intersection members differ");
  }
  return ConvexSet(Intersection{std::move(members)}, dim);
}

std::string_view ConvexSet::kind() const {
  return std::visit(Overloaded{
                        [](const Halfspace&) { return std::string_view("halfspace"); },
                        [](const Hyperplane&) { return std::string_view("hyperplane"); },
                        [](const Ball&) { return std::string_view("ball"); },
                        [](const Box&) { return std::string_view("box"); },
                        [](const Sublevel&) { return std::string_view("sublevel"); },
                        [](const Intersection&) { return std::string_view("intersection"); },
                    },
                    shape_);
}

Vector project(const ConvexSet& set, const Vector& x) {
  require_dim(x, set.dim(), "point");
  return std::visit(
      Overloaded{
          [&](const Halfspace& h) -> Vector {
            const double excess = h.normal.dot(x) - h.offset;
            if (excess <= 0.0) return x;
            return x - (excess / h.normal.squaredNorm()) * h.normal;
          },
          [&](const Hyperplane& h) -> Vector {
            const double excess = h.normal.dot(x) - h.offset;
            return x - (excess / h.normal.squaredNorm()) * h.normal;
          },
          [&](const Ball& b) -> Vector {
            const Vector offset = x - b.center;
            const double dist = offset.norm();
            if (dist <= b.radius) return x;
            return b.center + (b.radius / dist) * offset;
          },
          [&](const Box& b) -> Vector { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const Sublevel&) -> Vector {
            throw Error(ErrorCode::UnsupportedSet, "no closed-form projection onto a sublevel set");
          },
          [&](const Intersection&) -> Vector {
            throw Error(ErrorCode::UnsupportedSet, "no closed-form projection onto an intersection");
          },
      },
      set.shape());
}

bool contains(const ConvexSet& set, const Vector& x, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  require_dim(x, set.dim(), "point");
  return std::visit(
      Overloaded{
          [&](const Halfspace& h) {
            const double n = h.normal.norm();
            return (h.normal.dot(x) - h.offset) / n <= tol;
          },
          [&](const Hyperplane& h) {
            const double n = h.normal.norm();
            return std::abs(h.normal.dot(x) - h.offset) / n <= tol;
          },
          [&](const Ball& b) { return (x - b.center).norm() <= b.radius + tol; },
          [&](const Box& b) {
            return ((x.array() >= b.lower.array() - tol) && (x.array() <= b.upper.array() + tol))
                .all();
          },
          [&](const Sublevel& s) { return s.fn.value(x) <= tol; },
          [&](const Intersection& in) {
            return std::all_of(in.members.begin(), in.members.end(),
                               [&](const ConvexSet& m) { return contains(m, x, tol); });
          },
      },
      set.shape());
}

ConvexSet separating_halfspace(const ConvexFn& fn, const Vector& x, double epsilon) {
  require_dim(x, fn.dim, "point");
  const double violation = fn.value(x) + epsilon;
  if (!(violation > 0.0)) {
    throw Error(ErrorCode::NotViolating, "point already satisfies g(x) + eps <= 0");
  }
  const Vector u = fn.subgradient(x);
  require_dim(u, fn.dim, "subgradient");
  if (!(u.norm() > 0.0)) {
    throw Error(ErrorCode::ZeroSubgradient, "zero subgradient at a violating point");
  }
  // g(x) + eps + <u, y - x> <= 0  <=>  <u, y> <= <u, x> - g(x) - eps
  return ConvexSet::halfspace(u, u.dot(x) - violation);
}

ConvexSet inner_approximation(const ConvexFn& fn, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::NegativeEpsilon, "epsilon must be >= 0");
  return ConvexSet::sublevel(shifted(fn, epsilon));
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const ConvexSet& set) {
  return std::visit(
      Overloaded{
          [](const Halfspace& h) {
            return Json{{"variant", "halfspace"},
                        {"normal", vector_to_json(h.normal)},
                        {"offset", h.offset}};
          },
          [](const Hyperplane& h) {
            return Json{{"variant", "hyperplane"},
                        {"normal", vector_to_json(h.normal)},
                        {"offset", h.offset}};
          },
          [](const Ball& b) {
            return Json{
                {"variant", "ball"}, {"center", vector_to_json(b.center)}, {"radius", b.radius}};
          },
          [](const Box& b) {
            return Json{{"variant", "box"},
                        {"lower", vector_to_json(b.lower)},
                        {"upper", vector_to_json(b.upper)}};
          },
          [](const Sublevel&) -> Json {
            throw Error(ErrorCode::NotSerializable, "sublevel sets carry code and cannot be serialized");
          },
          [](const Intersection& in) {
            Json members = Json::array();
            for (const auto& m : in.members) members.push_back(to_json(m));
            return Json{{"variant", "intersection"}, {"members", members}};
          },
      },
      set.shape());
}

ConvexSet convex_set_from_json(const Json& j) {
  const std::string variant = detail::get_string(j, "variant");
  if (variant == "halfspace") {
    return ConvexSet::halfspace(vector_from_json(detail::field(j, "normal")),
                                detail::get_number(j, "offset"));
  }
  if (variant == "hyperplane") {
    return ConvexSet::hyperplane(vector_from_json(detail::field(j, "normal")),
                                 detail::get_number(j, "offset"));
  }
  if (variant == "ball") {
    return ConvexSet::ball(vector_from_json(detail::field(j, "center")),
                           detail::get_number(j, "radius"));
  }
  if (variant == "box") {
    return ConvexSet::box(vector_from_json(detail::field(j, "lower")),
                          vector_from_json(detail::field(j, "upper")));
  }
  if (variant == "intersection") {
    const Json& members = detail::field(j, "members");
    if (!members.is_array()) throw Error(ErrorCode::Parse, "intersection members must be an array");
    std::vector<ConvexSet> sets;
    for (const auto& m : members) sets.push_back(convex_set_from_json(m));
    return ConvexSet::intersection(std::move(sets));
  }
  if (variant == "sublevel") {
    throw Error(ErrorCode::NotSerializable, "sublevel sets cannot be read from JSON");
  }
  throw Error(ErrorCode::Parse, "unknown set variant '" + variant + "'");
}

}  // namespace fejerlab
