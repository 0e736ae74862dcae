#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "collision_ik/collision/scene.hpp"
#include "collision_ik/error.hpp"
#include "collision_ik/robot_model.hpp"
#include "collision_ik/solver/engine.hpp"

// Wire protocol v1. Every frame is a UTF-8 JSON object carrying "v": 1 and a
// "type" tag. Quaternions are [w, x, y, z]; lengths in meters.

namespace cik::protocol {

inline constexpr int kVersion = 1;

/// Error reply codes.
namespace code {
inline constexpr std::string_view kMalformed = "malformed";      // not a v1 frame of a known shape
inline constexpr std::string_view kBadVersion = "bad_version";
inline constexpr std::string_view kUnknownType = "unknown_type";
inline constexpr std::string_view kInvalid = "invalid";          // well-formed but the values are unusable
inline constexpr std::string_view kUnknownId = "unknown_id";
inline constexpr std::string_view kDuplicateId = "duplicate_id";
inline constexpr std::string_view kInternal = "internal";        // the solve failed; the last solution stands
}  // namespace code

class ProtocolError : public Error {
 public:
  ProtocolError(std::string_view code, const std::string& detail) : Error(detail), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Client to server.
struct GoalUpdate {
  Pose goal;
};
struct ObstacleUpdate {
  ObjectId id = 0;
  RigidTransform transform;
};
struct ObstacleAdd {
  CollisionObject object;
};
struct ObstacleRemove {
  ObjectId id = 0;
};
struct SetVariant {
  Variant variant = Variant::Cik;
};
using Inbound = std::variant<GoalUpdate, ObstacleUpdate, ObstacleAdd, ObstacleRemove, SetVariant>;

// Server to client.
struct Solution {
  double t = 0.0;
  JointVector theta;
  Pose ee;
  Pose goal;                  // the goal this tick solved for
  std::optional<double> min_distance;  // empty when the scene has no objects
  std::vector<ObjectId> active_ids;
  double solve_us = 0.0;
  Variant variant = Variant::Cik;
};
struct ObstacleInfo {
  ObjectId id = 0;
  Shape shape;
  RigidTransform transform;
  bool scripted = false;
};
struct SceneDescription {
  std::string robot;
  JointVector theta;
  JointVector lower;
  JointVector upper;
  std::vector<Capsule> links;  // at the current configuration, base frame
  std::vector<ObstacleInfo> obstacles;
  double tick_period = 0.0;
  Variant variant = Variant::Cik;
};
struct ErrorReply {
  std::string code;
  std::string detail;
};
using Outbound = std::variant<Solution, SceneDescription, ErrorReply>;

/// Throws ProtocolError. Never throws anything else.
Inbound parse_inbound(std::string_view frame);
/// For clients and tests. Throws ProtocolError.
Outbound parse_outbound(std::string_view frame);

std::string encode(const Inbound& message);
std::string encode(const Outbound& message);
std::string encode_error(std::string_view code, const std::string& detail);

}  // namespace cik::protocol
