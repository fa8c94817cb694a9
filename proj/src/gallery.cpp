#include "fejerlab/gallery.hpp"

#include <cmath>
#include <random>

#include "exact.hpp"
#include "fejerlab/error.hpp"

namespace fejerlab {

namespace {

constexpr double kBoxMargin = 1e-6;

Vector point2(double a, double b) { return Vector{{a, b}}; }

AnchorSet closure_point() { return AnchorSet{{point2(0.0, 0.0)}, "closure_point"}; }

std::vector<AnalyticFact> staircase_facts() {
  const double limit_beta_sq = 4.0 / 3.0;
  return {
      {"limit", vector_to_json(point2(0.0, std::sqrt(limit_beta_sq))), "closed-form"},
      {"limit_beta_sq", limit_beta_sq, "closed-form"},
      {"beta_sq_2", 3.0, "recursion"},
      {"beta_sq_4", 2.25, "recursion"},
      {"beta_sq_6", 1.8125, "recursion"},
  };
}

ExampleFixture base_fixture(std::string name, std::size_t num_iterates) {
  ExampleFixture f;
  f.name = std::move(name);
  f.trace = staircase_trace(num_iterates);
  f.analytic_facts = staircase_facts();
  return f;
}

}  // namespace

const AnchorSet& ExampleFixture::anchor_set(const std::string& label) const {
  for (const auto& a : anchor_sets) {
    if (a.label == label) return a;
  }
  throw Error(ErrorCode::InvalidArgument, "no anchor set '" + label + "' in fixture " + name);
}

const AnalyticFact& ExampleFixture::fact(const std::string& fact_name) const {
  for (const auto& f : analytic_facts) {
    if (f.name == fact_name) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "no fact '" + fact_name + "' in fixture " + name);
}

Trace staircase_trace(std::size_t num_iterates) {
  if (num_iterates < 1) throw Error(ErrorCode::InvalidArgument, "num_iterates must be >= 1");
  Trace trace;
  trace.algorithm = "staircase";
  trace.params = Json{{"x0", Json::array({0.0, 2.0})}, {"num_iterates", num_iterates}};
  trace.iterates.reserve(num_iterates);
  trace.iterates.push_back(point2(0.0, 2.0));

  double step = 1.0;
  while (trace.size() < num_iterates) {
    const Vector& x = trace.iterates.back();
    if (trace.size() % 2 == 1) {
      trace.iterates.push_back(point2(x[0] + step, x[1]));
      step *= 0.5;
    } else {
      // |x - (1,0)|^2 - 1, exactly
      const mpq_class a = mpq_class(x[0]) - 1;
      const mpq_class b = x[1];
      trace.iterates.push_back(point2(0.0, exact::sqrt_round_down(a * a + b * b - 1)));
    }
  }
  return trace;
}

ExampleFixture example_3_3(std::size_t num_iterates, std::size_t num_anchor_points, std::uint64_t seed) {
  if (num_anchor_points < 1) throw Error(ErrorCode::InvalidArgument, "num_anchor_points must be >= 1");
  ExampleFixture f = base_fixture("3.3", num_iterates);

  AnchorSet m{{}, "M_sample"};
  double w = 1.0;
  for (std::size_t l = 0; l < num_anchor_points; ++l, w *= 0.5) m.points.push_back(point2(w, 0.0));

  AnchorSet conv{{}, "convM_sample"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < num_anchor_points; ++i) conv.points.push_back(point2(1.0 - unit(rng), 0.0));

  f.anchor_sets = {std::move(m), std::move(conv), closure_point()};
  f.trace.params["seed"] = seed;
  f.expectations = Json{{"fejer_star_present", Json::array({"M_sample", "convM_sample"})},
                        {"fejer_star_absent", Json::array({"closure_point"})},
                        {"fejer_star_N_bound", "N(w^l) <= 2l"}};
  return f;
}

ExampleFixture example_remark_interior(std::size_t num_iterates, std::size_t grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must be >= 2");
  ExampleFixture f = base_fixture("remark", num_iterates);

  AnchorSet box{{}, "M_sample"};
  const double g = static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    // first coordinate runs from the margin up to 1 inclusive
    const double u = kBoxMargin + (1.0 - kBoxMargin) * static_cast<double>(i) / g;
    for (std::size_t j = 0; j < grid; ++j) {
      const double v = (-1.0 + kBoxMargin) * (1.0 - static_cast<double>(j) / g);
      box.points.push_back(point2(i + 1 == grid ? 1.0 : u, j + 1 == grid ? 0.0 : v));
    }
  }
  f.anchor_sets = {std::move(box), closure_point()};
  f.expectations = Json{{"fejer_star_present", Json::array({"M_sample"})},
                        {"fejer_star_absent", Json::array({"closure_point"})}};
  return f;
}

ExampleFixture example_quasi2_not_star(std::size_t num_iterates) {
  if (num_iterates < 4) throw Error(ErrorCode::InvalidArgument, "num_iterates must be >= 4");
  ExampleFixture f = base_fixture("quasi2", num_iterates);

  AnchorSet segment{{}, "segment_sample"};
  for (int i = 0; i <= 10; ++i) segment.points.push_back(point2(-1.0 + i / 10.0, 0.0));
  f.anchor_sets = {std::move(segment), closure_point()};
  f.expectations = Json{{"type2_classification", "consistent with summable"},
                        {"fejer_star_absent", Json::array({"closure_point"})}};
  return f;
}

std::vector<double> beta_squared_recursion(std::size_t levels) {
  std::vector<double> beta_sq{4.0};
  double step = 1.0;
  for (std::size_t l = 0; l < levels; ++l, step *= 0.5) {
    beta_sq.push_back(step * step - 2.0 * step + beta_sq.back());
  }
  return beta_sq;
}

Json to_json(const ExampleFixture& fixture) {
  Json sets = Json::object();
  for (const auto& a : fixture.anchor_sets) sets[a.label] = to_json(a);
  Json facts = Json::object();
  for (const auto& f : fixture.analytic_facts) facts[f.name] = Json{{"value", f.value}, {"source", f.source}};
  return Json{{"name", fixture.name},
              {"trace", to_json(fixture.trace)},
              {"anchor_sets", sets},
              {"analytic_facts", facts},
              {"expectations", fixture.expectations}};
}

}  // namespace fejerlab
