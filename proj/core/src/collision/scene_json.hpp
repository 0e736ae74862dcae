#pragma once

// Shape and object JSON shared by the scene file reader and the wire protocol.

#include <json.hpp>

#include "collision_ik/collision/scene.hpp"

namespace cik::detail {

/// {"kind": "sphere"|"box"|"capsule"|"hull", "data": ...}
Shape shape_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json shape_to_json(const Shape& shape);

MotionScript motion_from_json(const nlohmann::json& j, const std::string& path);

CollisionObject object_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json object_to_json(const CollisionObject& object);

}  // namespace cik::detail
