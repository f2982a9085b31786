#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "sway/error.hpp"
#include "sway/geometry.hpp"

// Small helpers for strict schema reading. Every failure is a
// SchemaViolation whose detail is the JSON path of the offending field.
namespace sway::json_util {

using nlohmann::json;

[[noreturn]] inline void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what, path);
}

inline std::string child(const std::string& path, const std::string& key) { return path + "." + key; }
inline std::string child(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline const json& object(const json& j, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  return j;
}

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) violation(child(path, key), "missing required field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) violation(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) violation(path, "expected a finite number");
  return v;
}

inline double number_field(const json& obj, const std::string& key, const std::string& path) {
  return number(field(obj, key, path), child(path, key));
}

inline std::string string_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) violation(child(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::uint64_t uint_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    violation(child(path, key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) violation(path, "expected an array");
  return j;
}

inline Point point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) violation(path, "expected [x, y]");
  return {number(j[0], child(path, 0)), number(j[1], child(path, 1))};
}

inline json to_json(const Point& p) { return json::array({p.x(), p.y()}); }

}  // namespace sway::json_util
