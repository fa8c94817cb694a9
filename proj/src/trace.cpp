#include "fejerlab/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fejerlab/error.hpp"
#include "json_util.hpp"

namespace fejerlab {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Unspecified: return "unspecified";
    case Termination::ResidualTolerance: return "residual_tolerance";
    case Termination::Feasible: return "feasible";
    case Termination::FinitelyConvergent: return "finitely_convergent";
    case Termination::Budget: return "budget";
  }
  return "unspecified";
}

Termination termination_from_string(std::string_view name) {
  for (auto t : {Termination::Unspecified, Termination::ResidualTolerance, Termination::Feasible,
                 Termination::FinitelyConvergent, Termination::Budget}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::Parse, "unknown termination status '" + std::string(name) + "'");
}

void Trace::validate() const {
  if (iterates.empty()) throw Error(ErrorCode::InvalidArgument, "trace needs at least x^0");
  const auto n = iterates.front().size();
  for (const auto& x : iterates) {
    require_finite(x, "iterate");
    require_dim(x, n, "iterate");
  }
  if (!annotations.empty() && annotations.size() + 1 != iterates.size()) {
    throw Error(ErrorCode::LengthMismatch, "annotations must have one entry per step");
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json annotation_to_json(const StepAnnotation& a) {
  Json out = Json::object();
  out["active_index"] = a.active_index ? Json(*a.active_index) : Json(nullptr);
  out["epsilon"] = a.epsilon ? Json(*a.epsilon) : Json(nullptr);
  out["residual"] = a.residual ? Json(*a.residual) : Json(nullptr);
  out["null_step"] = a.null_step;
  return out;
}

StepAnnotation annotation_from_json(const Json& j) {
  StepAnnotation a;
  if (!j.is_object()) throw Error(ErrorCode::Parse, "annotation must be an object");
  if (j.contains("active_index") && !j["active_index"].is_null()) {
    a.active_index = j["active_index"].get<std::size_t>();
  }
  if (j.contains("epsilon") && !j["epsilon"].is_null()) a.epsilon = j["epsilon"].get<double>();
  if (j.contains("residual") && !j["residual"].is_null()) a.residual = j["residual"].get<double>();
  if (j.contains("null_step")) a.null_step = j["null_step"].get<bool>();
  return a;
}

}  // namespace

Json to_json(const Trace& trace) {
  Json iterates = Json::array();
  for (const auto& x : trace.iterates) iterates.push_back(vector_to_json(x));
  Json annotations = Json::array();
  for (const auto& a : trace.annotations) annotations.push_back(annotation_to_json(a));
  return Json{{"algorithm", trace.algorithm},
              {"status", std::string(to_string(trace.status))},
              {"dim", trace.dim()},
              {"length", trace.size()},
              {"params", trace.params},
              {"iterates", iterates},
              {"annotations", annotations}};
}

Trace trace_from_json(const Json& j) {
  Trace trace;
  try {
    if (j.contains("algorithm")) trace.algorithm = detail::get_string(j, "algorithm");
    if (j.contains("status")) trace.status = termination_from_string(detail::get_string(j, "status"));
    if (j.contains("params")) trace.params = j.at("params");
    const Json& iterates = detail::field(j, "iterates");
    if (!iterates.is_array()) throw Error(ErrorCode::Parse, "iterates must be an array");
    for (const auto& x : iterates) trace.iterates.push_back(vector_from_json(x));
    if (j.contains("annotations")) {
      for (const auto& a : j.at("annotations")) trace.annotations.push_back(annotation_from_json(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed trace: ") + e.what());
  }
  trace.validate();
  return trace;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const Trace& trace) {
  trace.validate();
  out << "# algorithm: " << trace.algorithm << '\n';
  out << "# status: " << to_string(trace.status) << '\n';
  out << "# params: " << trace.params.dump() << '\n';
  out << 'k';
  for (Eigen::Index i = 0; i < trace.dim(); ++i) out << ",x_" << (i + 1);
  out << ",active_index,epsilon,residual,null_step\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < trace.dim(); ++i) out << ',' << format_double(trace.iterates[k][i]);
    if (k == 0 || trace.annotations.empty()) {
      out << ",,,,\n";
      continue;
    }
    const auto& a = trace.annotations[k - 1];
    out << ',' << (a.active_index ? std::to_string(*a.active_index) : "");
    out << ',' << (a.epsilon ? format_double(*a.epsilon) : "");
    out << ',' << (a.residual ? format_double(*a.residual) : "");
    out << ',' << (a.null_step ? 1 : 0) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, std::size_t line) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return value;
}

}  // namespace

Trace read_csv(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool any_annotation = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (key.find("algorithm") != std::string::npos) trace.algorithm = value;
      else if (key.find("status") != std::string::npos) trace.status = termination_from_string(value);
      else if (key.find("params") != std::string::npos) trace.params = parse_json_text(value, "csv params");
      continue;
    }
    auto cells = split_csv(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 2 || header.front() != "k") {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected a 'k,x_1,...' header");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": column count differs from header");
    }
    Vector x;
    std::vector<double> coords;
    StepAnnotation a;
    bool has_annotation = false;
    for (std::size_t c = 1; c < header.size(); ++c) {
      const auto& name = header[c];
      const auto& cell = cells[c];
      if (name.rfind("x_", 0) == 0) {
        coords.push_back(parse_double(cell, line_no));
      } else if (cell.empty()) {
        continue;
      } else if (name == "active_index") {
        a.active_index = static_cast<std::size_t>(parse_double(cell, line_no));
        has_annotation = true;
      } else if (name == "epsilon") {
        a.epsilon = parse_double(cell, line_no);
        has_annotation = true;
      } else if (name == "residual") {
        a.residual = parse_double(cell, line_no);
        has_annotation = true;
      } else if (name == "null_step") {
        a.null_step = cell == "1";
        has_annotation = true;
      }
    }
    trace.iterates.emplace_back(Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    if (trace.iterates.size() > 1) {
      trace.annotations.push_back(a);
      any_annotation = any_annotation || has_annotation;
    }
  }
  if (!any_annotation) trace.annotations.clear();
  trace.validate();
  return trace;
}

// ---------------------------------------------------------------------------
// Files

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                      ": malformed JSON");
  }
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

void save_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  if (format == TraceFormat::Csv) {
    write_csv(out, trace);
  } else {
    out << to_json(trace).dump(2) << '\n';
  }
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    Json j = parse_json_text(text, path.string());
    // Gallery fixtures wrap the trace.
    if (j.is_object() && j.contains("trace")) return trace_from_json(j.at("trace"));
    return trace_from_json(j);
  }
  std::istringstream stream(text);
  return read_csv(stream);
}

}  // namespace fejerlab
