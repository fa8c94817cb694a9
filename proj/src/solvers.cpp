#include "fejerlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fejerlab/error.hpp"

namespace fejerlab {

void StopRule::validate() const {
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(residual_tol >= 0.0) || !(feasibility_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "stop tolerances must be >= 0");
  }
}

namespace {

Json stop_to_json(const StopRule& stop) {
  return Json{{"max_iters", stop.max_iters},
              {"residual_tol", stop.residual_tol},
              {"feasibility_tol", stop.feasibility_tol}};
}

double parse_number(std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad schedule parameter '" + std::string(text) + "'");
  }
}

bool all_contain(std::span<const ConvexSet> sets, const Vector& x, double tol) {
  return std::all_of(sets.begin(), sets.end(), [&](const ConvexSet& s) { return contains(s, x, tol); });
}

void require_projectable(std::span<const ConvexSet> sets, const Vector& x0) {
  if (sets.empty()) throw Error(ErrorCode::EmptyProblem, "no sets given");
  require_finite(x0, "x0");
  for (const auto& s : sets) {
    require_dim(x0, s.dim(), "x0");
    if (std::holds_alternative<Sublevel>(s.shape()) || std::holds_alternative<Intersection>(s.shape())) {
      throw Error(ErrorCode::UnsupportedSet, "projection methods need closed-form sets");
    }
  }
}

/// Shared loop for the projection methods: `step` maps x^k to x^{k+1}.
template <class Step>
Trace run_projection_method(std::span<const ConvexSet> sets, const Vector& x0, const StopRule& stop,
                            Trace trace, Step&& step) {
  trace.iterates.push_back(x0);
  trace.status = Termination::Budget;
  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    const Vector& current = trace.iterates.back();
    Vector next = step(current);
    const double residual = (next - current).norm();
    trace.iterates.push_back(std::move(next));
    StepAnnotation note;
    note.residual = residual;
    trace.annotations.push_back(note);
    if (all_contain(sets, trace.iterates.back(), stop.feasibility_tol)) {
      trace.status = Termination::Feasible;
      break;
    }
    if (residual <= stop.residual_tol) {
      trace.status = Termination::ResidualTolerance;
      break;
    }
  }
  return trace;
}

Json sets_to_json(std::span<const ConvexSet> sets) {
  Json out = Json::array();
  for (const auto& s : sets) out.push_back(to_json(s));
  return out;
}

}  // namespace

EpsilonSchedule EpsilonSchedule::harmonic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidArgument, "harmonic scale must be positive");
  return EpsilonSchedule(Kind::Harmonic, scale, 0.0);
}

EpsilonSchedule EpsilonSchedule::geometric(double base, double ratio) {
  if (!(base > 0.0) || !std::isfinite(base)) throw Error(ErrorCode::InvalidArgument, "geometric base must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "geometric ratio must lie in (0,1)");
  return EpsilonSchedule(Kind::Geometric, base, ratio);
}

EpsilonSchedule EpsilonSchedule::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw Error(ErrorCode::NegativeEpsilon, "constant epsilon must be >= 0");
  return EpsilonSchedule(Kind::Constant, value, 0.0);
}

EpsilonSchedule EpsilonSchedule::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? text.npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts[0] == "harmonic" && parts.size() == 2) return harmonic(parse_number(parts[1]));
  if (parts[0] == "geometric" && parts.size() == 3) {
    return geometric(parse_number(parts[1]), parse_number(parts[2]));
  }
  if (parts[0] == "constant" && parts.size() == 2) return constant(parse_number(parts[1]));
  throw Error(ErrorCode::Parse, "bad schedule '" + std::string(text) + "'");
}

double EpsilonSchedule::at(std::size_t k) const {
  switch (kind_) {
    case Kind::Harmonic: return a_ / static_cast<double>(k + 1);
    case Kind::Geometric: return a_ * std::pow(b_, static_cast<double>(k));
    case Kind::Constant: return a_;
  }
  return a_;
}

Json EpsilonSchedule::to_json() const {
  switch (kind_) {
    case Kind::Harmonic: return Json{{"kind", "harmonic"}, {"scale", a_}};
    case Kind::Geometric: return Json{{"kind", "geometric"}, {"base", a_}, {"ratio", b_}};
    case Kind::Constant: return Json{{"kind", "constant"}, {"value", a_}};
  }
  return Json();
}

std::string_view to_string(IndexControl c) {
  return c == IndexControl::Cyclic ? "cyclic" : "most-violated";
}

IndexControl index_control_from_string(std::string_view name) {
  if (name == "cyclic") return IndexControl::Cyclic;
  if (name == "most-violated") return IndexControl::MostViolated;
  throw Error(ErrorCode::Parse, "unknown index control '" + std::string(name) + "'");
}

Trace iterate_fixed_point(const Operator& op, const Vector& x0, const StopRule& stop) {
  stop.validate();
  require_finite(x0, "x0");
  require_dim(x0, op.dim(), "x0");

  Trace trace;
  trace.algorithm = "fixed_point";
  trace.params = Json{{"operator", to_json(op)}, {"stop", stop_to_json(stop)}};
  trace.iterates.push_back(x0);
  trace.status = Termination::Budget;
  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    Vector next = apply(op, trace.iterates.back());
    const double residual = (next - trace.iterates.back()).norm();
    trace.iterates.push_back(std::move(next));
    StepAnnotation note;
    note.residual = residual;
    trace.annotations.push_back(note);
    if (residual <= stop.residual_tol) {
      trace.status = Termination::ResidualTolerance;
      break;
    }
  }
  return trace;
}

Trace simultaneous_projections(std::span<const ConvexSet> sets, std::span<const double> weights,
                               const Vector& x0, const StopRule& stop) {
  stop.validate();
  require_projectable(sets, x0);
  std::vector<Operator> projections;
  for (const auto& s : sets) projections.push_back(Operator::projection(s));
  const Operator averaged = Operator::convex_combination(
      std::vector<double>(weights.begin(), weights.end()), std::move(projections));

  Trace trace;
  trace.algorithm = "simultaneous_projections";
  trace.params = Json{{"sets", sets_to_json(sets)},
                      {"weights", Json(std::vector<double>(weights.begin(), weights.end()))},
                      {"stop", stop_to_json(stop)}};
  return run_projection_method(sets, x0, stop, std::move(trace),
                               [&](const Vector& x) { return apply(averaged, x); });
}

Trace sequential_projections(std::span<const ConvexSet> sets, const Vector& x0, const StopRule& stop) {
  stop.validate();
  require_projectable(sets, x0);

  Trace trace;
  trace.algorithm = "sequential_projections";
  trace.params = Json{{"sets", sets_to_json(sets)}, {"stop", stop_to_json(stop)}};
  return run_projection_method(sets, x0, stop, std::move(trace), [&](const Vector& x) {
    Vector out = x;
    for (const auto& s : sets) out = project(s, out);
    return out;
  });
}

Trace inner_approx_separating(std::span<const ConvexFn> fns, const Vector& x0,
                              const EpsilonSchedule& schedule, IndexControl control,
                              const StopRule& stop) {
  stop.validate();
  if (fns.empty()) throw Error(ErrorCode::EmptyProblem, "no constraint functions given");
  if (!schedule.vanishing()) {
    throw Error(ErrorCode::InvalidArgument, "inner approximation needs a positive vanishing schedule");
  }
  require_finite(x0, "x0");
  for (const auto& fn : fns) require_dim(x0, fn.dim, "x0");

  Trace trace;
  trace.algorithm = "inner_approx_separating";
  Json constraints = Json::array();
  for (const auto& fn : fns) constraints.push_back(fn.descriptor);
  trace.params = Json{{"constraints", constraints},
                      {"schedule", schedule.to_json()},
                      {"control", std::string(to_string(control))},
                      {"stop", stop_to_json(stop)}};

  auto feasible = [&](const Vector& x) {
    return std::all_of(fns.begin(), fns.end(),
                       [&](const ConvexFn& g) { return g.value(x) <= stop.feasibility_tol; });
  };

  trace.iterates.push_back(x0);
  if (feasible(x0)) {
    trace.status = Termination::FinitelyConvergent;
    return trace;
  }
  trace.status = Termination::Budget;
  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    const Vector current = trace.iterates.back();
    const double eps = schedule.at(k);

    std::size_t index = k % fns.size();
    double value = 0.0;
    if (control == IndexControl::MostViolated) {
      value = fns[0].value(current);
      index = 0;
      for (std::size_t i = 1; i < fns.size(); ++i) {
        const double v = fns[i].value(current);
        if (v > value) {
          value = v;
          index = i;
        }
      }
    } else {
      value = fns[index].value(current);
    }

    StepAnnotation note;
    note.active_index = index;
    note.epsilon = eps;
    if (value + eps <= 0.0) {
      note.null_step = true;
      note.residual = 0.0;
      trace.iterates.push_back(current);
    } else {
      Vector next = project(separating_halfspace(fns[index], current, eps), current);
      note.residual = (next - current).norm();
      trace.iterates.push_back(std::move(next));
    }
    trace.annotations.push_back(note);

    if (feasible(trace.iterates.back())) {
      trace.status = Termination::FinitelyConvergent;
      break;
    }
  }
  return trace;
}

}  // namespace fejerlab
