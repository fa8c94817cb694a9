#include "fejerlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "fejerlab/error.hpp"
#include "json_util.hpp"

namespace fejerlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

Eigen::Index common_dim(const std::vector<Operator>& ops) {
  if (ops.empty()) throw Error(ErrorCode::InvalidArgument, "operator list is empty");
  const auto dim = ops.front().dim();
  for (const auto& op : ops) {
    if (op.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "member operators differ in dimension");
  }
  return dim;
}

}  // namespace

Operator Operator::projection(ConvexSet set) {
  if (std::holds_alternative<Sublevel>(set.shape()) ||
      std::holds_alternative<Intersection>(set.shape())) {
    throw Error(ErrorCode::UnsupportedSet, "projection operator needs a closed-form set");
  }
  const auto dim = set.dim();
  return Operator(ProjectionOp{std::move(set)}, dim);
}

Operator Operator::affine(Matrix matrix, Vector shift) {
  require_finite(shift, "affine shift");
  if (matrix.rows() != matrix.cols() || matrix.rows() != shift.size()) {
    throw Error(ErrorCode::DimensionMismatch, "affine map needs a square matrix matching the shift");
  }
  if (!matrix.allFinite()) throw Error(ErrorCode::InvalidArgument, "affine matrix not finite");
  const auto dim = shift.size();
  return Operator(AffineOp{std::move(matrix), std::move(shift)}, dim);
}

Operator Operator::identity(Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  return affine(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

Operator Operator::convex_combination(std::vector<double> weights, std::vector<Operator> ops) {
  if (weights.size() != ops.size()) {
    throw Error(ErrorCode::LengthMismatch, "one weight per operator required");
  }
  const auto dim = common_dim(ops);
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidArgument, "weights must lie in [0,1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "weights must sum to 1");
  }
  return Operator(ConvexCombinationOp{std::move(weights), std::move(ops)}, dim);
}

Operator Operator::composition(std::vector<Operator> ops) {
  const auto dim = common_dim(ops);
  return Operator(CompositionOp{std::move(ops)}, dim);
}

Vector apply(const Operator& op, const Vector& x) {
  require_dim(x, op.dim(), "point");
  return std::visit(Overloaded{
                        [&](const ProjectionOp& p) -> Vector { return project(p.set, x); },
                        [&](const AffineOp& a) -> Vector { return a.matrix * x + a.shift; },
                        [&](const ConvexCombinationOp& c) -> Vector {
                          Vector out = Vector::Zero(x.size());
                          for (std::size_t i = 0; i < c.ops.size(); ++i) {
                            out += c.weights[i] * apply(c.ops[i], x);
                          }
                          return out;
                        },
                        [&](const CompositionOp& c) -> Vector {
                          Vector out = x;
                          for (const auto& inner : c.ops) out = apply(inner, out);
                          return out;
                        },
                    },
                    op.node());
}

double fixed_point_residual(const Operator& op, const Vector& x) { return (apply(op, x) - x).norm(); }

std::string_view to_string(Property p) {
  switch (p) {
    case Property::Contraction: return "contraction";
    case Property::Nonexpansive: return "nonexpansive";
    case Property::FirmlyNonexpansive: return "firmly-nonexpansive";
    case Property::NonexpansivePlus: return "nonexpansive-plus";
  }
  return "unknown";
}

Property property_from_string(std::string_view name) {
  for (auto p : {Property::Contraction, Property::Nonexpansive, Property::FirmlyNonexpansive,
                 Property::NonexpansivePlus}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::Parse, "unknown operator property '" + std::string(name) + "'");
}

bool PropertyReport::passed() const {
  if (!violations.empty()) return false;
  if (property == Property::Contraction) return estimated_tau && *estimated_tau < 1.0;
  return true;
}

PropertyReport check_property(const Operator& op, Property property,
                              std::span<const PointPair> pairs, double tol) {
  if (pairs.empty()) throw Error(ErrorCode::EmptySample, "property check needs at least one pair");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");

  struct Evaluated {
    double input_gap;
    double image_gap;
    double displacement;  // |(Tx-Ty) - (x-y)|
  };
  std::vector<Evaluated> evaluated;
  evaluated.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    const Vector dx = x - y;
    const Vector dt = apply(op, x) - apply(op, y);
    evaluated.push_back({dx.norm(), dt.norm(), (dt - dx).norm()});
  }

  PropertyReport report{property, pairs.size(), std::numeric_limits<double>::infinity(), {}, {}};

  double tau = 0.0;
  if (property == Property::Contraction) {
    for (const auto& e : evaluated) {
      if (e.input_gap > 0.0) tau = std::max(tau, e.image_gap / e.input_gap);
    }
    report.estimated_tau = tau;
  }

  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    const auto& e = evaluated[i];
    double slack = 0.0;
    switch (property) {
      case Property::Contraction:
        slack = tau * e.input_gap - e.image_gap;
        break;
      case Property::Nonexpansive:
        slack = e.input_gap - e.image_gap;
        break;
      case Property::FirmlyNonexpansive:
        slack = e.input_gap * e.input_gap - e.displacement * e.displacement -
                e.image_gap * e.image_gap;
        break;
      case Property::NonexpansivePlus:
        slack = e.input_gap - e.image_gap;
        if (std::abs(e.image_gap - e.input_gap) <= tol) slack = std::min(slack, -e.displacement);
        break;
    }
    report.worst_slack = std::min(report.worst_slack, slack);
    if (slack < -tol) report.violations.push_back({i, pairs[i].first, pairs[i].second, slack});
  }
  return report;
}

std::vector<PointPair> sample_pairs(Eigen::Index dim, std::size_t count, double lo, double hi,
                                    std::uint64_t seed) {
  if (dim < 1 || !(lo < hi)) throw Error(ErrorCode::InvalidArgument, "bad sampling box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(lo, hi);
  std::vector<PointPair> pairs;
  pairs.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Vector x(dim), y(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = coord(rng);
    for (Eigen::Index i = 0; i < dim; ++i) y[i] = coord(rng);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

Json to_json(const Operator& op) {
  return std::visit(Overloaded{
                        [](const ProjectionOp& p) {
                          return Json{{"variant", "projection"}, {"set", to_json(p.set)}};
                        },
                        [](const AffineOp& a) {
                          Json rows = Json::array();
                          for (Eigen::Index r = 0; r < a.matrix.rows(); ++r) {
                            rows.push_back(vector_to_json(a.matrix.row(r).transpose()));
                          }
                          return Json{{"variant", "affine"},
                                      {"matrix", rows},
                                      {"shift", vector_to_json(a.shift)}};
                        },
                        [](const ConvexCombinationOp& c) {
                          Json terms = Json::array();
                          for (std::size_t i = 0; i < c.ops.size(); ++i) {
                            terms.push_back(Json{{"weight", c.weights[i]}, {"op", to_json(c.ops[i])}});
                          }
                          return Json{{"variant", "convex_combination"}, {"terms", terms}};
                        },
                        [](const CompositionOp& c) {
                          Json ops = Json::array();
                          for (const auto& inner : c.ops) ops.push_back(to_json(inner));
                          return Json{{"variant", "composition"}, {"ops", ops}};
                        },
                    },
                    op.node());
}

Operator operator_from_json(const Json& j) {
  const std::string variant = detail::get_string(j, "variant");
  if (variant == "projection") return Operator::projection(convex_set_from_json(detail::field(j, "set")));
  if (variant == "affine") {
    const Json& rows = detail::field(j, "matrix");
    Vector shift = vector_from_json(detail::field(j, "shift"));
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(shift.size())) {
      throw Error(ErrorCode::Parse, "affine matrix must have one row per shift component");
    }
    Matrix m(shift.size(), shift.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Vector row = vector_from_json(rows[r]);
      if (row.size() != shift.size()) throw Error(ErrorCode::Parse, "affine matrix must be square");
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return Operator::affine(std::move(m), std::move(shift));
  }
  if (variant == "convex_combination") {
    const Json& terms = detail::field(j, "terms");
    if (!terms.is_array()) throw Error(ErrorCode::Parse, "terms must be an array");
    std::vector<double> weights;
    std::vector<Operator> ops;
    for (const auto& t : terms) {
      weights.push_back(detail::get_number(t, "weight"));
      ops.push_back(operator_from_json(detail::field(t, "op")));
    }
    return Operator::convex_combination(std::move(weights), std::move(ops));
  }
  if (variant == "composition") {
    const Json& list = detail::field(j, "ops");
    if (!list.is_array()) throw Error(ErrorCode::Parse, "ops must be an array");
    std::vector<Operator> ops;
    for (const auto& o : list) ops.push_back(operator_from_json(o));
    return Operator::composition(std::move(ops));
  }
  throw Error(ErrorCode::Parse, "unknown operator variant '" + variant + "'");
}

Json to_json(const PropertyReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back(Json{{"index", v.index},
                              {"x", vector_to_json(v.x)},
                              {"y", vector_to_json(v.y)},
                              {"slack", v.slack}});
  }
  Json out{{"property", std::string(to_string(report.property))},
           {"samples", report.samples},
           {"worst_slack", report.worst_slack}};
  out["estimated_tau"] = report.estimated_tau ? Json(*report.estimated_tau) : Json(nullptr);
  out["passed"] = report.passed();
  out["violations"] = violations;
  return out;
}

}  // namespace fejerlab
