#include "fejerlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "fejerlab/diagnostics.hpp"
#include "fejerlab/error.hpp"
#include "fejerlab/gallery.hpp"
#include "fejerlab/operators.hpp"
#include "fejerlab/solvers.hpp"
#include "json_util.hpp"

namespace fejerlab::cli {

namespace {

namespace fs = std::filesystem;

struct SolveArgs {
  std::string method;
  std::string problem;
  std::string schedule = "harmonic:1";
  std::string control = "cyclic";
  std::optional<std::size_t> max_iters;
  std::string out;
  std::string format;
};

struct AnalyzeArgs {
  std::string trace;
  std::string anchors;
  std::string anchor_set;
  std::string report;
  std::optional<double> tol;
  bool clusters = false;
  double tail = 0.25;
  double radius = 1e-6;
  std::string plot;
};

struct ExampleArgs {
  std::string name;
  std::size_t iters = 200;
  std::size_t anchors_count = 6;
  std::size_t grid = 5;
  std::uint64_t seed = 0;
  std::string out;
};

struct OperatorArgs {
  std::string op;
  std::string property;
  std::size_t pairs = 1000;
  std::uint64_t seed = 0;
  double lo = -3.0;
  double hi = 3.0;
  std::optional<double> tol;
  std::string report;
};

double resolve_tol(const std::optional<double>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FEJERLAB_TOL"); env && *env) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used == std::string(env).size() && v >= 0.0) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::Parse, std::string("FEJERLAB_TOL is not a nonnegative number: ") + env);
  }
  return kDefaultRelTol;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

TraceFormat pick_format(const std::string& flag, const std::string& path) {
  if (flag == "csv") return TraceFormat::Csv;
  if (flag == "json") return TraceFormat::Json;
  if (!flag.empty()) throw Error(ErrorCode::Parse, "unknown format '" + flag + "'");
  return fs::path(path).extension() == ".csv" ? TraceFormat::Csv : TraceFormat::Json;
}

StopRule stop_rule_from(const Json& problem, const std::optional<std::size_t>& max_iters) {
  StopRule stop;
  if (problem.contains("stop")) {
    const Json& s = problem["stop"];
    if (s.contains("max_iters")) stop.max_iters = s["max_iters"].get<std::size_t>();
    if (s.contains("residual_tol")) stop.residual_tol = detail::get_number(s, "residual_tol");
    if (s.contains("feasibility_tol")) stop.feasibility_tol = detail::get_number(s, "feasibility_tol");
  }
  if (max_iters) stop.max_iters = *max_iters;
  stop.validate();
  return stop;
}

std::vector<ConvexSet> sets_from(const Json& problem) {
  const Json& arr = detail::field(problem, "sets");
  if (!arr.is_array()) throw Error(ErrorCode::Parse, "'sets' must be an array");
  std::vector<ConvexSet> sets;
  for (const auto& s : arr) sets.push_back(convex_set_from_json(s));
  return sets;
}

int do_solve(const SolveArgs& a, std::ostream& out) {
  const Json problem = load_json_file(a.problem);
  if (!problem.is_object()) throw Error(ErrorCode::Parse, a.problem + ": problem must be an object");
  const Vector x0 = vector_from_json(detail::field(problem, "x0"));
  const StopRule stop = stop_rule_from(problem, a.max_iters);
  const TraceFormat format = pick_format(a.format, a.out);

  Trace trace;
  if (a.method == "fixed-point") {
    trace = iterate_fixed_point(operator_from_json(detail::field(problem, "operator")), x0, stop);
  } else if (a.method == "simultaneous") {
    const auto sets = sets_from(problem);
    std::vector<double> weights;
    if (problem.contains("weights")) {
      weights = problem["weights"].get<std::vector<double>>();
    } else {
      weights.assign(sets.size(), 1.0 / static_cast<double>(sets.size()));
    }
    trace = simultaneous_projections(sets, weights, x0, stop);
  } else if (a.method == "sequential") {
    trace = sequential_projections(sets_from(problem), x0, stop);
  } else if (a.method == "inner-approx") {
    const Json& arr = detail::field(problem, "constraints");
    if (!arr.is_array()) throw Error(ErrorCode::Parse, "'constraints' must be an array");
    std::vector<ConvexFn> fns;
    for (const auto& c : arr) fns.push_back(convex_fn_from_json(c));
    trace = inner_approx_separating(fns, x0, EpsilonSchedule::parse(a.schedule),
                                    index_control_from_string(a.control), stop);
  } else {
    throw Error(ErrorCode::Parse, "unknown method '" + a.method + "'");
  }

  save_trace(a.out, trace, format);
  out << trace.algorithm << ": " << trace.size() << " iterates, status " << to_string(trace.status) << "\n";
  return trace.status == Termination::Budget ? kExitBudget : kExitOk;
}

std::vector<AnchorSet> anchors_from(const Json& j, const std::string& only) {
  std::vector<AnchorSet> sets;
  if (j.is_object() && j.contains("anchor_sets")) {
    const Json& all = j["anchor_sets"];
    if (!all.is_object()) throw Error(ErrorCode::Parse, "'anchor_sets' must be an object");
    for (const auto& [label, value] : all.items()) {
      if (!only.empty() && label != only) continue;
      sets.push_back(anchor_set_from_json(value, label));
    }
    if (sets.empty()) throw Error(ErrorCode::InvalidArgument, "no anchor set named '" + only + "'");
    return sets;
  }
  sets.push_back(anchor_set_from_json(j));
  return sets;
}

void write_plot(const std::string& path, const Trace& trace, const std::vector<AnchorSet>& sets,
                const std::vector<MonotonicityReport>& reports) {
  std::ostringstream csv;
  csv << "k";
  for (const auto& s : sets) {
    for (std::size_t i = 0; i < s.points.size(); ++i) csv << ",d_" << s.label << "_" << i;
  }
  for (const auto& s : sets) csv << ",eps2_" << s.label;
  csv << "\n";

  std::vector<std::vector<double>> columns;
  for (const auto& s : sets) {
    for (const auto& p : s.points) columns.push_back(distance_sequence(trace, p));
  }
  for (std::size_t k = 0; k < trace.size(); ++k) {
    csv << k;
    for (const auto& c : columns) csv << "," << format_double(c[k]);
    for (const auto& r : reports) {
      csv << ",";
      if (k < r.type2.epsilons.size()) csv << format_double(r.type2.epsilons[k]);
    }
    csv << "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  file << csv.str();
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const double tol = resolve_tol(a.tol);
  const Trace trace = load_trace(a.trace);
  const auto sets = anchors_from(load_json_file(a.anchors), a.anchor_set);

  std::vector<MonotonicityReport> reports;
  Json monotonicity = Json::array();
  for (const auto& s : sets) {
    reports.push_back(analyze_monotonicity(trace, s, tol));
    monotonicity.push_back(to_json(reports.back()));
  }
  Json report{{"trace", Json{{"algorithm", trace.algorithm},
                             {"status", std::string(to_string(trace.status))},
                             {"length", trace.size()}}},
              {"monotonicity", monotonicity}};
  if (a.clusters) report["clusters"] = to_json(cluster_points(trace, a.tail, a.radius));
  if (!a.plot.empty()) write_plot(a.plot, trace, sets, reports);
  write_text(a.report, dump(report), out);
  return kExitOk;
}

int do_example(const ExampleArgs& a, std::ostream& out) {
  ExampleFixture fixture;
  if (a.name == "3.3") {
    fixture = example_3_3(a.iters, a.anchors_count, a.seed);
  } else if (a.name == "remark") {
    fixture = example_remark_interior(a.iters, a.grid);
  } else if (a.name == "quasi2") {
    fixture = example_quasi2_not_star(a.iters);
  } else {
    throw Error(ErrorCode::Parse, "unknown example '" + a.name + "'");
  }
  write_text(a.out, dump(to_json(fixture)), out);
  return kExitOk;
}

int do_operator_test(const OperatorArgs& a, std::ostream& out) {
  const double tol = resolve_tol(a.tol);
  const Operator op = operator_from_json(load_json_file(a.op));
  const Property property = property_from_string(a.property);
  const auto pairs = sample_pairs(op.dim(), a.pairs, a.lo, a.hi, a.seed);
  const PropertyReport report = check_property(op, property, pairs, tol);
  Json j = to_json(report);
  j["seed"] = a.seed;
  write_text(a.report, dump(j), out);
  return kExitOk;
}

int exit_code_for(const Error& e, bool diagnostics) {
  if (e.code() == ErrorCode::Parse) return kExitParse;
  return diagnostics ? kExitPrecondition : kExitParse;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fejer monotonicity laboratory", "fejerlab"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "run a solver on a problem file and write its trace");
  solve_cmd->add_option("--method", solve.method, "fixed-point | simultaneous | sequential | inner-approx")
      ->required()
      ->check(CLI::IsMember({"fixed-point", "simultaneous", "sequential", "inner-approx"}));
  solve_cmd->add_option("--problem", solve.problem, "problem JSON")->required();
  solve_cmd->add_option("--schedule", solve.schedule, "harmonic:s | geometric:b:r")->capture_default_str();
  solve_cmd->add_option("--control", solve.control, "cyclic | most-violated")->capture_default_str();
  solve_cmd->add_option("--max-iters", solve.max_iters, "iteration budget");
  solve_cmd->add_option("--out", solve.out, "trace output file")->required();
  solve_cmd->add_option("--format", solve.format, "csv | json (default from extension, else json)");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "classify a trace against anchor sets");
  analyze_cmd->add_option("--trace", analyze.trace, "trace file (JSON, CSV or fixture)")->required();
  analyze_cmd->add_option("--anchors", analyze.anchors, "anchor JSON or fixture")->required();
  analyze_cmd->add_option("--anchor-set", analyze.anchor_set, "only this set of a fixture");
  analyze_cmd->add_option("--report", analyze.report, "report output (default stdout)");
  analyze_cmd->add_option("--tol", analyze.tol, "relative tolerance; 0 compares exactly");
  analyze_cmd->add_flag("--clusters", analyze.clusters, "add a cluster report");
  analyze_cmd->add_option("--tail", analyze.tail, "tail fraction for clustering")->capture_default_str();
  analyze_cmd->add_option("--radius", analyze.radius, "cluster radius")->capture_default_str();
  analyze_cmd->add_option("--plot", analyze.plot, "CSV of k, d_k per anchor, eps_k");

  ExampleArgs example;
  auto* example_cmd = app.add_subcommand("example", "write a gallery fixture");
  example_cmd->add_option("--name", example.name, "3.3 | remark | quasi2")
      ->required()
      ->check(CLI::IsMember({"3.3", "remark", "quasi2"}));
  example_cmd->add_option("--iters", example.iters, "number of iterates")->capture_default_str();
  example_cmd->add_option("--anchors-count", example.anchors_count, "points per sampled set")
      ->capture_default_str();
  example_cmd->add_option("--grid", example.grid, "grid size for remark")->capture_default_str();
  example_cmd->add_option("--seed", example.seed, "random seed")->capture_default_str();
  example_cmd->add_option("--out", example.out, "fixture output (default stdout)");

  OperatorArgs optest;
  auto* op_cmd = app.add_subcommand("operator-test", "check an operator property on sampled pairs");
  op_cmd->add_option("--operator", optest.op, "operator JSON")->required();
  op_cmd->add_option("--property", optest.property,
                     "contraction | nonexpansive | firmly-nonexpansive | nonexpansive-plus")
      ->required();
  op_cmd->add_option("--pairs", optest.pairs, "number of sampled pairs")->capture_default_str();
  op_cmd->add_option("--seed", optest.seed, "random seed")->capture_default_str();
  op_cmd->add_option("--lo", optest.lo, "sampling box lower bound")->capture_default_str();
  op_cmd->add_option("--hi", optest.hi, "sampling box upper bound")->capture_default_str();
  op_cmd->add_option("--tol", optest.tol, "tolerance");
  op_cmd->add_option("--report", optest.report, "report output (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  const bool diagnostics = analyze_cmd->parsed();
  try {
    if (solve_cmd->parsed()) return do_solve(solve, out);
    if (analyze_cmd->parsed()) return do_analyze(analyze, out);
    if (example_cmd->parsed()) return do_example(example, out);
    return do_operator_test(optest, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e, diagnostics);
  } catch (const Json::exception& e) {
    err << "error [parse]: " << e.what() << "\n";
    return kExitParse;
  }
}

}  // namespace fejerlab::cli
