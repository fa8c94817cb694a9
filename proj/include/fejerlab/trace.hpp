#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fejerlab/geometry.hpp"

namespace fejerlab {

enum class Termination {
  Unspecified,
  ResidualTolerance,
  Feasible,
  FinitelyConvergent,
  Budget,
};

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view name);

/// What happened on the step x^k -> x^{k+1}.
struct StepAnnotation {
  std::optional<std::size_t> active_index;
  std::optional<double> epsilon;
  std::optional<double> residual;
  bool null_step = false;
};

/// A finite iterate sequence x^0, x^1, ... with provenance.
///
/// `annotations` is either empty or has one entry per step, so
/// annotations[k] describes x^k -> x^{k+1}.
struct Trace {
  std::vector<Vector> iterates;
  std::string algorithm;
  Json params = Json::object();
  std::vector<StepAnnotation> annotations;
  Termination status = Termination::Unspecified;

  std::size_t size() const { return iterates.size(); }
  Eigen::Index dim() const { return iterates.empty() ? 0 : iterates.front().size(); }

  /// Throws InvalidArgument / DimensionMismatch when the invariants fail.
  void validate() const;
};

enum class TraceFormat { Csv, Json };

Json to_json(const Trace& trace);
Trace trace_from_json(const Json& j);

/// One row per iterate: k, x_1..x_n, active_index, epsilon, residual, null_step.
/// Metadata goes in leading "# key: value" lines. Numbers are written in
/// shortest round-trip form.
void write_csv(std::ostream& out, const Trace& trace);
Trace read_csv(std::istream& in);

/// Format chosen by the caller; `load_trace` sniffs JSON vs CSV by content.
void save_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format);
Trace load_trace(const std::filesystem::path& path);

/// Parses text as JSON, reporting errors with line and column.
Json parse_json_text(const std::string& text, const std::string& source);
Json load_json_file(const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace fejerlab
