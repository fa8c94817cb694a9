#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace fejerlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Json = nlohmann::ordered_json;

/// Base of the relative tolerance tol = base * (1 + |x|).
inline constexpr double kDefaultRelTol = 1e-9;

double relative_tol(const Vector& x, double base = kDefaultRelTol);

/// Throws InvalidArgument unless v is nonempty with finite components.
void require_finite(const Vector& v, std::string_view what);
/// Throws DimensionMismatch unless v has `dim` components.
void require_dim(const Vector& v, Eigen::Index dim, std::string_view what);

Vector vector_from_json(const Json& j);
Json vector_to_json(const Vector& v);

/// A convex function given by value and subgradient callables.
///
/// Convexity is a contract on the callables; verify_convex_fn() samples it.
/// `descriptor` names a built-in family with its parameters, or is null for
/// ad-hoc callables (which then cannot be serialized).
struct ConvexFn {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  Eigen::Index dim = 0;
  Json descriptor;
};

/// g(y) = |y - center|^2 - radius^2, whose zero sublevel set is the ball.
ConvexFn ball_constraint(const Vector& center, double radius);
/// g(y) = <normal, y> - offset.
ConvexFn affine_constraint(const Vector& normal, double offset);
/// g(y) + shift.
ConvexFn shifted(const ConvexFn& fn, double shift);

/// Builds a built-in oracle from {"oracle": "ball"|"affine", ...}.
ConvexFn convex_fn_from_json(const Json& j);
Json to_json(const ConvexFn& fn);

struct OracleCheck {
  std::size_t pairs = 0;
  double worst_convexity_slack = 0.0;
  double worst_subgradient_slack = 0.0;
  bool passed = true;
};

/// Sampled falsification of the convexity and subgradient inequalities over
/// random pairs (and random t in [0,1]) drawn from `points`.
OracleCheck verify_convex_fn(const ConvexFn& fn, std::span<const Vector> points,
                             std::size_t num_pairs, std::uint64_t seed, double tol);

/// {y : <normal, y> <= offset}
struct Halfspace {
  Vector normal;
  double offset;
};
/// {y : <normal, y> = offset}
struct Hyperplane {
  Vector normal;
  double offset;
};
struct Ball {
  Vector center;
  double radius;
};
struct Box {
  Vector lower;
  Vector upper;
};
/// {y : fn(y) <= 0}
struct Sublevel {
  ConvexFn fn;
};
class ConvexSet;
struct Intersection {
  std::vector<ConvexSet> members;
};

/// Closed convex set. Immutable once built; the factories enforce the
/// invariants of each variant.
class ConvexSet {
 public:
  using Shape = std::variant<Halfspace, Hyperplane, Ball, Box, Sublevel, Intersection>;

  static ConvexSet halfspace(Vector normal, double offset);
  static ConvexSet hyperplane(Vector normal, double offset);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet sublevel(ConvexFn fn);
  static ConvexSet intersection(std::vector<ConvexSet> members);

  const Shape& shape() const { return shape_; }
  Eigen::Index dim() const { return dim_; }
  std::string_view kind() const;

 private:
  ConvexSet(Shape shape, Eigen::Index dim) : shape_(std::move(shape)), dim_(dim) {}

  Shape shape_;
  Eigen::Index dim_;
};

/// Euclidean projection. Closed form for halfspace, hyperplane, ball and box;
/// UnsupportedSet for sublevel sets and intersections.
Vector project(const ConvexSet& set, const Vector& x);

/// Membership within additive tolerance `tol` on the defining inequalities.
/// Halfspace and hyperplane inequalities are measured after normalizing the
/// normal, so `tol` is a Euclidean distance there.
bool contains(const ConvexSet& set, const Vector& x, double tol);

/// The halfspace {y : g(x) + eps + <u, y - x> <= 0} with u a subgradient at x.
/// It contains {g + eps <= 0} and excludes x.
ConvexSet separating_halfspace(const ConvexFn& fn, const Vector& x, double epsilon);

/// {y : g(y) + eps <= 0}. May be empty.
ConvexSet inner_approximation(const ConvexFn& fn, double epsilon);

Json to_json(const ConvexSet& set);
ConvexSet convex_set_from_json(const Json& j);

}  // namespace fejerlab
