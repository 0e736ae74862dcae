#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collision_ik/server/protocol.hpp"
#include "collision_ik/solver/engine.hpp"

namespace cik::server {

using ClientId = std::uint64_t;
/// Reply address meaning all clients. Real clients count from 1.
inline constexpr ClientId kEveryone = 0;

struct OutFrame {
  std::string text;
  bool droppable = false;  // solutions only
  bool error = false;
};

/// Send order per client: replies, then the scene frame, then the solution.
struct TickOutput {
  protocol::Solution solution;
  OutFrame solution_frame;                // to every client
  std::optional<OutFrame> scene_frame;    // to every client, when the scene was edited
  std::vector<std::pair<ClientId, OutFrame>> replies;
};

/// One robot stream. Handlers on any thread call submit() and connect();
/// the loop thread calls tick(). Queued messages apply in arrival order
/// between solves, so a tick never sees half an update.
class Session {
 public:
  Session(RobotModel model, CollisionScene scene, EngineConfig config, JointVector theta0,
          Variant variant = Variant::Cik);

  /// Parses and queues a frame. Returns the Error frame for a malformed
  /// one; the queue is left untouched in that case.
  std::optional<std::string> submit(ClientId from, std::string_view frame);
  /// Queues a SceneDescription for a newly connected client.
  void connect(ClientId client);
  std::size_t pending() const;

  /// Drains the queue, then solves for time t (which must increase).
  TickOutput tick(double t);

  // Loop thread only.
  const Engine& engine() const { return engine_; }
  const Pose& goal() const { return goal_; }
  Variant variant() const { return variant_; }
  std::uint64_t ticks() const { return ticks_; }
  protocol::SceneDescription describe() const;

 private:
  struct Queued {
    ClientId from = 0;
    std::optional<protocol::Inbound> message;  // empty: a connect
  };

  // Returns an error frame for the sender, if any; sets scene_edited.
  std::optional<std::string> apply(const protocol::Inbound& message, bool& scene_edited);

  Engine engine_;
  ObjectiveSpec standard_;
  Variant variant_;
  Pose goal_;
  std::uint64_t ticks_ = 0;

  mutable std::mutex mutex_;
  std::vector<Queued> queue_;
};

}  // namespace cik::server
