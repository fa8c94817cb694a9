#pragma once

#include <string>

#include "fejerlab/error.hpp"
#include "fejerlab/geometry.hpp"

namespace fejerlab::detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::Parse, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline double get_number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::string get_string(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace fejerlab::detail
