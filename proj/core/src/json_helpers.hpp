#pragma once

// Shared JSON plumbing for the document formats. Not installed.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "collision_ik/error.hpp"
#include "collision_ik/transform.hpp"

namespace cik::detail {

using nlohmann::json;

inline std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError((path.empty() ? std::string("document") : path) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(join_path(path, key) + ": missing field");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& path) {
  if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path + ": expected a finite number");
    return v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw ParseError(path + ": expected a string");
    return j.get<std::string>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ParseError(path + ": expected a boolean");
    return j.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<T>();
  } else {
    static_assert(sizeof(T) == 0, "unsupported type");
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& path) {
  return as<T>(require_field(j, key, path), join_path(path, key));
}

template <typename T>
T optional(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as<T>(j.at(key), join_path(path, key));
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected an array of 3 numbers");
  return {as<double>(j[0], path + "[0]"), as<double>(j[1], path + "[1]"), as<double>(j[2], path + "[2]")};
}

/// w-first. Renormalizes small drift from decimal round-off; rejects anything
/// further than 1e-3 from unit length.
inline Quat quat_wxyz(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) throw ParseError(path + ": expected an array of 4 numbers (w, x, y, z)");
  Quat q(as<double>(j[0], path + "[0]"), as<double>(j[1], path + "[1]"), as<double>(j[2], path + "[2]"),
         as<double>(j[3], path + "[3]"));
  if (std::abs(q.norm() - 1.0) > 1e-3) throw ValidationError(path, "quaternion must have unit norm");
  return q.normalized();
}

inline RigidTransform transform(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object with xyz and quat_wxyz");
  RigidTransform tf;
  if (j.contains("xyz")) tf.translation = vec3(j.at("xyz"), path + ".xyz");
  if (j.contains("quat_wxyz")) tf.rotation = quat_wxyz(j.at("quat_wxyz"), path + ".quat_wxyz");
  return tf;
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }
inline json to_json(const RigidTransform& tf) {
  return {{"xyz", to_json(tf.translation)}, {"quat_wxyz", to_json(tf.rotation)}};
}

}  // namespace cik::detail
