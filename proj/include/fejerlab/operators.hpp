#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fejerlab/geometry.hpp"

namespace fejerlab {

class Operator;

struct ProjectionOp {
  ConvexSet set;
};
/// x -> matrix * x + shift
struct AffineOp {
  Matrix matrix;
  Vector shift;
};
/// x -> sum_i weights[i] * ops[i](x)
struct ConvexCombinationOp {
  std::vector<double> weights;
  std::vector<Operator> ops;
};
/// Applied left to right: {P1, P2} is P2 o P1.
struct CompositionOp {
  std::vector<Operator> ops;
};

/// An operator T: R^n -> R^n built from projections and affine maps.
class Operator {
 public:
  using Node = std::variant<ProjectionOp, AffineOp, ConvexCombinationOp, CompositionOp>;

  static Operator projection(ConvexSet set);
  static Operator affine(Matrix matrix, Vector shift);
  static Operator identity(Eigen::Index dim);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static Operator convex_combination(std::vector<double> weights, std::vector<Operator> ops);
  static Operator composition(std::vector<Operator> ops);

  const Node& node() const { return node_; }
  Eigen::Index dim() const { return dim_; }

 private:
  Operator(Node node, Eigen::Index dim) : node_(std::move(node)), dim_(dim) {}

  Node node_;
  Eigen::Index dim_;
};

Vector apply(const Operator& op, const Vector& x);

/// |T(x) - x|
double fixed_point_residual(const Operator& op, const Vector& x);

enum class Property { Contraction, Nonexpansive, FirmlyNonexpansive, NonexpansivePlus };

std::string_view to_string(Property p);
Property property_from_string(std::string_view name);

using PointPair = std::pair<Vector, Vector>;

struct PairViolation {
  std::size_t index;
  Vector x;
  Vector y;
  double slack;
};

/// Result of a sampled falsification run. `violations` holds exactly the
/// pairs with slack < -tol, in pair order.
struct PropertyReport {
  Property property;
  std::size_t samples = 0;
  double worst_slack = 0.0;
  std::optional<double> estimated_tau;
  std::vector<PairViolation> violations;

  /// No violation found; for Contraction also requires estimated_tau < 1.
  bool passed() const;
};

/// Slack per pair (negative means the inequality fails):
///   Contraction        tau |x-y| - |Tx-Ty|, tau = max ratio over the pairs
///   Nonexpansive       |x-y| - |Tx-Ty|
///   FirmlyNonexpansive |x-y|^2 - |(Tx-Ty)-(x-y)|^2 - |Tx-Ty|^2
///   NonexpansivePlus   nonexpansive slack; when |Tx-Ty| equals |x-y| within
///                      tol, additionally -|(Tx-Ty)-(x-y)|
PropertyReport check_property(const Operator& op, Property property,
                              std::span<const PointPair> pairs, double tol);

/// Uniform random pairs in [lo, hi]^dim.
std::vector<PointPair> sample_pairs(Eigen::Index dim, std::size_t count, double lo, double hi,
                                    std::uint64_t seed);

Json to_json(const Operator& op);
Operator operator_from_json(const Json& j);
Json to_json(const PropertyReport& report);

}  // namespace fejerlab
