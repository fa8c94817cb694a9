#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fejerlab/diagnostics.hpp"
#include "fejerlab/trace.hpp"

namespace fejerlab {

struct AnalyticFact {
  std::string name;
  Json value;
  /// "closed-form", "recursion", ...
  std::string source;
};

struct ExampleFixture {
  std::string name;
  Trace trace;
  std::vector<AnchorSet> anchor_sets;
  std::vector<AnalyticFact> analytic_facts;
  Json expectations = Json::object();

  /// Throws InvalidArgument for an unknown label.
  const AnchorSet& anchor_set(const std::string& label) const;
  const AnalyticFact& fact(const std::string& name) const;
};

/// Iterates of the staircase converging to (0, sqrt(4/3)):
///   x^0 = (0, 2)
///   x^{2l+1} = x^{2l} + (2^-l, 0)
///   x^{2l+2} = (0, sqrt(|x^{2l+1} - (1,0)|^2 - 1))
/// The square root is taken of the exactly evaluated radicand and rounded
/// down, so every stored iterate satisfies |x^k - (1,0)| >= 1 and the
/// non-increase of the second coordinate exactly.
Trace staircase_trace(std::size_t num_iterates);

/// Anchor sets M_sample = {(2^-l, 0)}, convM_sample (random (lambda, 0),
/// lambda in (0,1]) and closure_point = {(0,0)}.
ExampleFixture example_3_3(std::size_t num_iterates, std::size_t num_anchor_points,
                           std::uint64_t seed = 0);

/// Same trace; anchors on a grid x grid sample of (0,1] x (-1,0], kept 1e-6
/// away from the excluded edges.
ExampleFixture example_remark_interior(std::size_t num_iterates, std::size_t grid);

/// Same trace; 11 anchors evenly spaced on [-1,0] x {0}.
ExampleFixture example_quasi2_not_star(std::size_t num_iterates);

/// beta^2_{2l} for l = 0..levels from
///   beta^2_{2l+2} = 4^-l - 2 * 2^-l + beta^2_{2l},  beta^2_0 = 4.
std::vector<double> beta_squared_recursion(std::size_t levels);

Json to_json(const ExampleFixture& fixture);

}  // namespace fejerlab
