#include <string>

#include "collision/scene_json.hpp"
#include "collision_ik/collision/quickhull.hpp"
#include "collision_ik/error.hpp"
#include "json_helpers.hpp"

namespace cik {

namespace detail {

using nlohmann::json;

Shape shape_from_json(const json& j, const std::string& path) {
  const std::string kind = require<std::string>(j, "kind", path);
  const json& data = require_field(j, "data", path);
  const std::string dpath = path + ".data";
  if (kind == "sphere") {
    const double r = require<double>(data, "radius", dpath);
    if (!(r > 0.0)) throw ValidationError(dpath + ".radius", "radius must be positive");
    return Sphere{r};
  }
  if (kind == "box") {
    const Vec3 h = vec3(require_field(data, "half_extents", dpath), dpath + ".half_extents");
    if (!(h.minCoeff() > 0.0)) throw ValidationError(dpath + ".half_extents", "half extents must be positive");
    return Box{h};
  }
  if (kind == "capsule") {
    Capsule c{vec3(require_field(data, "p0", dpath), dpath + ".p0"), vec3(require_field(data, "p1", dpath), dpath + ".p1"),
              require<double>(data, "radius", dpath)};
    if (!(c.radius > 0.0)) throw ValidationError(dpath + ".radius", "radius must be positive");
    return c;
  }
  if (kind == "hull") {
    // Either a bare point array or {"points": [...]}.
    const json& pts = data.is_object() ? require_field(data, "points", dpath) : data;
    if (!pts.is_array()) throw ParseError(dpath + ": expected an array of points");
    std::vector<Vec3> cloud;
    cloud.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) cloud.push_back(vec3(pts[i], dpath + "[" + std::to_string(i) + "]"));
    try {
      return convex_hull(cloud);
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError(dpath + ": " + e.what());
    }
  }
  throw ValidationError(path + ".kind", "unknown shape kind '" + kind + "'");
}

json shape_to_json(const Shape& shape) {
  struct Visitor {
    json operator()(const Sphere& s) const { return {{"kind", "sphere"}, {"data", {{"radius", s.radius}}}}; }
    json operator()(const Box& b) const {
      return {{"kind", "box"}, {"data", {{"half_extents", to_json(b.half_extents)}}}};
    }
    json operator()(const Capsule& c) const {
      return {{"kind", "capsule"}, {"data", {{"p0", to_json(c.p0)}, {"p1", to_json(c.p1)}, {"radius", c.radius}}}};
    }
    json operator()(const ConvexHull& h) const {
      json pts = json::array();
      for (const auto& v : h.vertices()) pts.push_back(to_json(v));
      json faces = json::array();
      for (const auto& f : h.faces()) faces.push_back({f[0], f[1], f[2]});
      return {{"kind", "hull"}, {"data", {{"points", std::move(pts)}, {"faces", std::move(faces)}}}};
    }
  };
  return std::visit(Visitor{}, shape);
}

MotionScript motion_from_json(const json& j, const std::string& path) {
  const std::string kind = require<std::string>(j, "kind", path);
  const json& params = require_field(j, "params", path);
  const std::string ppath = path + ".params";
  if (kind == "linear") {
    const Vec3 v = vec3(require_field(params, "velocity", ppath), ppath + ".velocity");
    const Vec3 w = params.contains("angular_velocity")
                       ? vec3(params.at("angular_velocity"), ppath + ".angular_velocity")
                       : Vec3::Zero();
    return MotionScript::linear(v, w);
  }
  if (kind == "waypoints") {
    const json& times = require_field(params, "times", ppath);
    const json& poses = require_field(params, "poses", ppath);
    if (!times.is_array() || !poses.is_array()) throw ParseError(ppath + ": times and poses must be arrays");
    std::vector<double> t;
    std::vector<RigidTransform> p;
    for (std::size_t i = 0; i < times.size(); ++i) t.push_back(as<double>(times[i], ppath + ".times[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < poses.size(); ++i) p.push_back(transform(poses[i], ppath + ".poses[" + std::to_string(i) + "]"));
    return MotionScript::waypoints(std::move(t), std::move(p));
  }
  throw ValidationError(path + ".kind", "unknown motion kind '" + kind + "'");
}

CollisionObject object_from_json(const json& j, const std::string& path) {
  CollisionObject obj;
  obj.id = require<std::int64_t>(j, "id", path);
  obj.shape = shape_from_json(require_field(j, "shape", path), path + ".shape");
  if (j.contains("transform")) obj.initial = transform(j.at("transform"), path + ".transform");
  obj.transform = obj.initial;
  if (j.contains("motion")) {
    obj.motion = motion_from_json(j.at("motion"), path + ".motion");
    obj.transform = obj.motion->evaluate(obj.initial, 0.0);
  }
  return obj;
}

json object_to_json(const CollisionObject& object) {
  return {{"id", object.id}, {"shape", shape_to_json(object.shape)}, {"transform", to_json(object.transform)}};
}

}  // namespace detail

CollisionScene parse_scene(std::string_view document, SceneParams params) {
  const auto doc = detail::parse_json(document);
  if (!doc.is_array()) throw ParseError("scene: top level must be an array of objects");
  CollisionScene scene(params);
  for (std::size_t i = 0; i < doc.size(); ++i) scene.add(detail::object_from_json(doc[i], "[" + std::to_string(i) + "]"));
  return scene;
}

CollisionScene load_scene(const std::string& path, SceneParams params) {
  return parse_scene(detail::read_file(path), params);
}

}  // namespace cik
