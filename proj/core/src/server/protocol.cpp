#include "collision_ik/server/protocol.hpp"

#include <limits>

#include "collision/scene_json.hpp"
#include "json_helpers.hpp"

namespace cik::protocol {

using nlohmann::json;
using detail::to_json;

namespace {

ObjectId object_id(const json& j, const std::string& path) {
  const json& v = detail::require_field(j, "id", path);
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<ObjectId>::max()))
    throw ValidationError(detail::join_path(path, "id"), "id out of range");
  return detail::as<ObjectId>(v, detail::join_path(path, "id"));
}

// Top-level "position" and "quat_wxyz"; both optional for obstacles.
RigidTransform placement(const json& j, bool required) {
  RigidTransform tf;
  if (required || j.contains("position")) tf.translation = detail::vec3(detail::require_field(j, "position", ""), "position");
  if (required || j.contains("quat_wxyz")) tf.rotation = detail::quat_wxyz(detail::require_field(j, "quat_wxyz", ""), "quat_wxyz");
  return tf;
}

void put_placement(json& j, const RigidTransform& tf) {
  j["position"] = to_json(tf.translation);
  j["quat_wxyz"] = to_json(tf.rotation);
}

json frame(std::string_view type) { return {{"v", kVersion}, {"type", type}}; }

json vector_json(const JointVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

JointVector vector_from(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
  JointVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::as<double>(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Variant variant_field(const json& j, bool allow_ablation) {
  const std::string name = detail::require<std::string>(j, "variant", "");
  const auto v = variant_from_string(name);
  if (!v || (!allow_ablation && *v == Variant::RikAblated))
    throw ValidationError("variant", "expected cik, cik3 or cikA, got '" + name + "'");
  return *v;
}

const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const json& a = detail::require_field(j, key, path);
  if (!a.is_array()) throw ParseError(detail::join_path(path, key) + ": expected an array");
  return a;
}

json capsule_json(const Capsule& c) { return {{"p0", to_json(c.p0)}, {"p1", to_json(c.p1)}, {"radius", c.radius}}; }

// Parses the document and checks the envelope; returns the type tag.
std::pair<json, std::string> envelope(std::string_view text) {
  json doc;
  try {
    doc = detail::parse_json(text);
  } catch (const ParseError& e) {
    throw ProtocolError(code::kMalformed, e.what());
  }
  if (!doc.is_object()) throw ProtocolError(code::kMalformed, "frame must be a JSON object");
  const auto v = doc.find("v");
  if (v == doc.end()) throw ProtocolError(code::kMalformed, "v: missing field");
  if (!v->is_number_integer() || v->get<std::int64_t>() != kVersion)
    throw ProtocolError(code::kBadVersion, "v: this server speaks version 1");
  const auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw ProtocolError(code::kMalformed, "type: expected a string");
  std::string t = type->get<std::string>();
  return {std::move(doc), std::move(t)};
}

// Runs a field decoder and maps library errors onto reply codes.
template <typename F>
auto decode(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProtocolError&) {
    throw;
  } catch (const ParseError& e) {
    throw ProtocolError(code::kMalformed, e.what());
  } catch (const ValidationError& e) {
    throw ProtocolError(code::kInvalid, e.what());
  } catch (const DegenerateInputError& e) {
    throw ProtocolError(code::kInvalid, e.what());
  } catch (const std::exception& e) {
    throw ProtocolError(code::kMalformed, e.what());
  }
}

}  // namespace

Inbound parse_inbound(std::string_view text) {
  return decode([&]() -> Inbound {
    const auto [doc, type] = envelope(text);
    if (type == "goal_update") {
      const RigidTransform tf = placement(doc, true);
      return GoalUpdate{{tf.translation, tf.rotation}};
    }
    if (type == "obstacle_update") return ObstacleUpdate{object_id(doc, ""), placement(doc, true)};
    if (type == "obstacle_add") {
      CollisionObject obj;
      obj.id = object_id(doc, "");
      obj.shape = detail::shape_from_json(detail::require_field(doc, "shape", ""), "shape");
      obj.initial = obj.transform = placement(doc, false);
      return ObstacleAdd{std::move(obj)};
    }
    if (type == "obstacle_remove") return ObstacleRemove{object_id(doc, "")};
    if (type == "set_variant") return SetVariant{variant_field(doc, false)};
    throw ProtocolError(code::kUnknownType, "type: '" + type + "' is not a client message");
  });
}

Outbound parse_outbound(std::string_view text) {
  return decode([&]() -> Outbound {
    const auto [doc, type] = envelope(text);
    if (type == "solution") {
      Solution s;
      s.t = detail::require<double>(doc, "t", "");
      s.theta = vector_from(detail::require_field(doc, "theta", ""), "theta");
      const json& ee = detail::require_field(doc, "ee", "");
      const RigidTransform e = placement(ee, true);
      s.ee = {e.translation, e.rotation};
      const RigidTransform g = placement(detail::require_field(doc, "goal", ""), true);
      s.goal = {g.translation, g.rotation};
      const json& md = detail::require_field(doc, "min_distance", "");
      if (!md.is_null()) s.min_distance = detail::as<double>(md, "min_distance");
      for (const auto& id : array_field(doc, "active_ids", "")) s.active_ids.push_back(detail::as<ObjectId>(id, "active_ids"));
      s.solve_us = detail::require<double>(doc, "solve_us", "");
      s.variant = variant_field(doc, true);
      return s;
    }
    if (type == "scene_description") {
      SceneDescription d;
      const json& robot = detail::require_field(doc, "robot", "");
      d.robot = detail::require<std::string>(robot, "name", "robot");
      d.theta = vector_from(detail::require_field(robot, "theta", "robot"), "robot.theta");
      d.lower = vector_from(detail::require_field(robot, "lower", "robot"), "robot.lower");
      d.upper = vector_from(detail::require_field(robot, "upper", "robot"), "robot.upper");
      for (const auto& c : array_field(robot, "links", "robot"))
        d.links.push_back({detail::vec3(detail::require_field(c, "p0", "robot.links"), "p0"),
                           detail::vec3(detail::require_field(c, "p1", "robot.links"), "p1"),
                           detail::require<double>(c, "radius", "robot.links")});
      for (const auto& o : array_field(doc, "obstacles", "")) {
        ObstacleInfo info;
        info.id = object_id(o, "obstacles");
        info.shape = detail::shape_from_json(detail::require_field(o, "shape", "obstacles"), "obstacles.shape");
        info.transform = placement(o, true);
        info.scripted = detail::optional<bool>(o, "scripted", "obstacles", false);
        d.obstacles.push_back(std::move(info));
      }
      d.tick_period = detail::require<double>(doc, "tick_period", "");
      d.variant = variant_field(doc, true);
      return d;
    }
    if (type == "error")
      return ErrorReply{detail::require<std::string>(doc, "code", ""), detail::require<std::string>(doc, "detail", "")};
    throw ProtocolError(code::kUnknownType, "type: '" + type + "' is not a server message");
  });
}

std::string encode(const Inbound& message) {
  struct Visitor {
    json operator()(const GoalUpdate& m) const {
      json j = frame("goal_update");
      put_placement(j, {m.goal.position, m.goal.orientation});
      return j;
    }
    json operator()(const ObstacleUpdate& m) const {
      json j = frame("obstacle_update");
      j["id"] = m.id;
      put_placement(j, m.transform);
      return j;
    }
    json operator()(const ObstacleAdd& m) const {
      json j = frame("obstacle_add");
      j["id"] = m.object.id;
      j["shape"] = detail::shape_to_json(m.object.shape);
      put_placement(j, m.object.transform);
      return j;
    }
    json operator()(const ObstacleRemove& m) const {
      json j = frame("obstacle_remove");
      j["id"] = m.id;
      return j;
    }
    json operator()(const SetVariant& m) const {
      json j = frame("set_variant");
      j["variant"] = std::string(to_string(m.variant));
      return j;
    }
  };
  return std::visit(Visitor{}, message).dump();
}

std::string encode(const Outbound& message) {
  struct Visitor {
    json operator()(const Solution& s) const {
      json j = frame("solution");
      j["t"] = s.t;
      j["theta"] = vector_json(s.theta);
      json ee;
      put_placement(ee, {s.ee.position, s.ee.orientation});
      j["ee"] = std::move(ee);
      json goal;
      put_placement(goal, {s.goal.position, s.goal.orientation});
      j["goal"] = std::move(goal);
      j["min_distance"] = s.min_distance ? json(*s.min_distance) : json(nullptr);
      j["active_ids"] = s.active_ids;
      j["solve_us"] = s.solve_us;
      j["variant"] = std::string(to_string(s.variant));
      return j;
    }
    json operator()(const SceneDescription& d) const {
      json j = frame("scene_description");
      json links = json::array();
      for (const auto& c : d.links) links.push_back(capsule_json(c));
      j["robot"] = {{"name", d.robot},
                    {"dof", d.theta.size()},
                    {"theta", vector_json(d.theta)},
                    {"lower", vector_json(d.lower)},
                    {"upper", vector_json(d.upper)},
                    {"links", std::move(links)}};
      json obstacles = json::array();
      for (const auto& o : d.obstacles) {
        json e{{"id", o.id}, {"shape", detail::shape_to_json(o.shape)}, {"scripted", o.scripted}};
        put_placement(e, o.transform);
        obstacles.push_back(std::move(e));
      }
      j["obstacles"] = std::move(obstacles);
      j["tick_period"] = d.tick_period;
      j["variant"] = std::string(to_string(d.variant));
      return j;
    }
    json operator()(const ErrorReply& e) const {
      json j = frame("error");
      j["code"] = e.code;
      j["detail"] = e.detail;
      return j;
    }
  };
  // Details may quote invalid UTF-8 from the offending frame.
  return std::visit(Visitor{}, message).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string encode_error(std::string_view code, const std::string& detail) {
  return encode(Outbound{ErrorReply{std::string(code), detail}});
}

}  // namespace cik::protocol
