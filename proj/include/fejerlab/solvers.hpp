#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "fejerlab/geometry.hpp"
#include "fejerlab/operators.hpp"
#include "fejerlab/trace.hpp"

namespace fejerlab {

struct StopRule {
  std::size_t max_iters = 1000;
  double residual_tol = 1e-12;
  double feasibility_tol = 1e-12;

  void validate() const;
};

/// Tolerance sequence eps_k, indexed from k = 0.
class EpsilonSchedule {
 public:
  /// eps_k = scale / (k + 1)
  static EpsilonSchedule harmonic(double scale);
  /// eps_k = base * ratio^k, ratio in (0,1)
  static EpsilonSchedule geometric(double base, double ratio);
  static EpsilonSchedule constant(double value);
  /// "harmonic:1", "geometric:1:0.5", "constant:0.1"
  static EpsilonSchedule parse(std::string_view text);

  double at(std::size_t k) const;
  /// Positive, nonincreasing and tending to zero (harmonic, geometric).
  bool vanishing() const { return kind_ != Kind::Constant; }
  Json to_json() const;

 private:
  enum class Kind { Harmonic, Geometric, Constant };
  EpsilonSchedule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

enum class IndexControl { Cyclic, MostViolated };

std::string_view to_string(IndexControl c);
IndexControl index_control_from_string(std::string_view name);

/// x^{k+1} = T(x^k). Stops once |x^{k+1} - x^k| <= residual_tol, so the
/// confirming step is part of the trace.
Trace iterate_fixed_point(const Operator& op, const Vector& x0, const StopRule& stop);

/// Iterates sum_i w_i P_{C_i}. Stops on feasibility of every C_i (checked
/// after each step), on the residual, or on the budget.
Trace simultaneous_projections(std::span<const ConvexSet> sets, std::span<const double> weights,
                               const Vector& x0, const StopRule& stop);

/// One trace entry per sweep P_{C_m} o ... o P_{C_1}; same stopping rules.
Trace sequential_projections(std::span<const ConvexSet> sets, const Vector& x0, const StopRule& stop);

/// Separating-hyperplane method on the shrinking inner approximations
/// {g_i + eps_k <= 0}. Steps whose selected constraint is already
/// eps_k-satisfied repeat the iterate (null steps) so trace index k always
/// matches schedule index k. Finishes as FinitelyConvergent once every
/// g_i(x^k) <= feasibility_tol, otherwise Budget.
Trace inner_approx_separating(std::span<const ConvexFn> fns, const Vector& x0,
                              const EpsilonSchedule& schedule, IndexControl control,
                              const StopRule& stop);

}  // namespace fejerlab
