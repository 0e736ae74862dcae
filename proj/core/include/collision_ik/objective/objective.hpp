#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collision_ik/collision/scene.hpp"
#include "collision_ik/objective/groove.hpp"
#include "collision_ik/robot_model.hpp"

namespace cik {

enum class TermKind {
  EePosition,
  EeOrientation,
  MinVelocity,
  MinAcceleration,
  MinJerk,
  SelfCollision,
  EnvCollision,
  SingularityPenalty,
};

std::string_view to_string(TermKind kind);
std::optional<TermKind> term_kind_from_string(std::string_view name);

struct ObjectiveTerm {
  TermKind kind = TermKind::EePosition;
  double weight = 0.0;
  GrooveParams groove;
};

enum class AdaptivePolicy { Off, CikA };

struct ObjectiveSpec {
  std::vector<ObjectiveTerm> terms;
  double epsilon = 0.02;             // shared with the scene
  double delta_min = 1e-3;           // distance clamp in collision costs
  AdaptivePolicy adaptive = AdaptivePolicy::Off;
  double d_hi = 0.2;                 // CIK-A ramp top, m
  double manipulability_min = 0.01;  // singularity penalty threshold

  /// Throws ValidationError: negative weight, invalid groove, repeated kind.
  void validate() const;

  const ObjectiveTerm* find(TermKind kind) const;
  ObjectiveTerm* find(TermKind kind);
  ObjectiveSpec without(TermKind kind) const;

  /// All eight terms with the project's default weights and groove shapes.
  static ObjectiveSpec defaults();
};

/// Groove shape of the environment collision term.
inline constexpr GrooveParams kCollisionGroove{1, 0.0, 2.5, 0.0035};

/// Fixed-capacity ring of the last accepted (theta, t) samples.
class SolveHistory {
 public:
  explicit SolveHistory(std::size_t capacity = 4, double nominal_dt = 0.008);

  /// Clears and pre-fills with `theta` at synthetic past times t0 - k dt so
  /// every finite-difference term starts at zero.
  void prime(const JointVector& theta, double t0);
  /// Throws unless t is strictly after the latest sample.
  void push(const JointVector& theta, double t);

  /// k = 0 is the latest sample.
  const JointVector& theta(std::size_t k) const;
  double time(std::size_t k) const;
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buffer_.size(); }
  double nominal_dt() const { return dt_; }

 private:
  std::vector<std::pair<JointVector, double>> buffer_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  double dt_;
};

/// Everything a term needs besides the candidate configuration.
struct EvalContext {
  const RobotModel& model;
  const SolveHistory& history;
  const Pose* goal = nullptr;
  std::span<const ActiveObstacle> active;
  double t = 0.0;
};

/// Sum over active objects and links of collision_pair_cost.
double collision_cost(std::span<const ActiveObstacle> active, std::span<const Capsule> links, double epsilon,
                      double delta_min);

/// Same form over link pairs whose index gap is at least two.
double self_collision_cost(std::span<const Capsule> links, double epsilon, double delta_min);

/// Minimum distance over link pairs whose index gap is at least two; +inf
/// for chains shorter than three links.
double self_min_distance(std::span<const Capsule> links);

/// Raw term input chi for `theta` at the context's tick.
double term_value(TermKind kind, const ObjectiveSpec& spec, const EvalContext& ctx, const JointVector& theta);

/// f = sum_j w_j groove(chi_j).
double objective(const ObjectiveSpec& spec, const EvalContext& ctx, const JointVector& theta);

/// CIK-A: orientation weight scaled by clamp((d - eps) / (d_hi - eps), 0, 1).
double adaptive_ramp(double min_distance, double epsilon, double d_hi);
ObjectiveSpec adapt_weights(const ObjectiveSpec& standard, double min_distance);

/// Objective configuration document (see README).
ObjectiveSpec parse_objective_spec(std::string_view document);
ObjectiveSpec load_objective_spec(const std::string& path);
std::string serialize_objective_spec(const ObjectiveSpec& spec);

}  // namespace cik
