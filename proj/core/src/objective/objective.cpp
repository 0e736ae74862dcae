#include "collision_ik/objective/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "collision_ik/error.hpp"

namespace cik {

namespace {

constexpr std::array<std::pair<TermKind, std::string_view>, 8> kKindNames = {{
    {TermKind::EePosition, "ee_position"},
    {TermKind::EeOrientation, "ee_orientation"},
    {TermKind::MinVelocity, "min_velocity"},
    {TermKind::MinAcceleration, "min_acceleration"},
    {TermKind::MinJerk, "min_jerk"},
    {TermKind::SelfCollision, "self_collision"},
    {TermKind::EnvCollision, "env_collision"},
    {TermKind::SingularityPenalty, "singularity_penalty"},
}};

}  // namespace

std::string_view to_string(TermKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<TermKind> term_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

void ObjectiveSpec::validate() const {
  std::set<TermKind> seen;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const std::string path = "terms[" + std::to_string(i) + "]";
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) throw ValidationError(path + ".weight", "must be nonnegative");
    if (!t.groove.valid()) throw ValidationError(path + ".groove", "requires n in {0,1}, c > 0, r >= 0");
    if (!seen.insert(t.kind).second)
      throw ValidationError(path + ".kind", "duplicate term '" + std::string(to_string(t.kind)) + "'");
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  if (!(delta_min > 0.0)) throw ValidationError("delta_min", "must be positive");
  if (!(d_hi > epsilon)) throw ValidationError("d_hi", "must exceed epsilon");
  if (!(manipulability_min > 0.0)) throw ValidationError("manipulability_min", "must be positive");
}

const ObjectiveTerm* ObjectiveSpec::find(TermKind kind) const {
  for (const auto& t : terms)
    if (t.kind == kind) return &t;
  return nullptr;
}

ObjectiveTerm* ObjectiveSpec::find(TermKind kind) {
  for (auto& t : terms)
    if (t.kind == kind) return &t;
  return nullptr;
}

ObjectiveSpec ObjectiveSpec::without(TermKind kind) const {
  ObjectiveSpec out = *this;
  out.terms.erase(std::remove_if(out.terms.begin(), out.terms.end(), [&](const auto& t) { return t.kind == kind; }),
                  out.terms.end());
  return out;
}

ObjectiveSpec ObjectiveSpec::defaults() {
  const GrooveParams tight{1, 0.0, 0.2, 5.0};
  // Derivative norms are in rad/s^k, so each well is as wide as a typical
  // tracking value. Narrower jerk wells make the stream oscillate.
  auto wide = [](double c) { return GrooveParams{1, 0.0, c, 0.01 / (c * c * c * c)}; };
  ObjectiveSpec spec;
  spec.terms = {
      {TermKind::EePosition, 50.0, tight},
      {TermKind::EeOrientation, 40.0, tight},
      {TermKind::MinVelocity, 0.1, wide(2.0)},
      {TermKind::MinAcceleration, 1.0, wide(2000.0)},
      {TermKind::MinJerk, 2.0, wide(1e6)},
      {TermKind::SelfCollision, 0.1, kCollisionGroove},
      {TermKind::EnvCollision, 1.2, kCollisionGroove},
      {TermKind::SingularityPenalty, 1.0, tight},
  };
  return spec;
}

// ---------------------------------------------------------------------------

SolveHistory::SolveHistory(std::size_t capacity, double nominal_dt) : buffer_(capacity), dt_(nominal_dt) {
  if (capacity < 4) throw ValidationError("history.capacity", "must hold at least 4 samples");
  if (!(nominal_dt > 0.0)) throw ValidationError("history.nominal_dt", "must be positive");
}

void SolveHistory::prime(const JointVector& theta, double t0) {
  size_ = 0;
  head_ = 0;
  for (std::size_t k = capacity(); k-- > 0;) {
    buffer_[head_] = {theta, t0 - static_cast<double>(k) * dt_};
    head_ = (head_ + 1) % capacity();
    ++size_;
  }
}

void SolveHistory::push(const JointVector& theta, double t) {
  if (size_ > 0 && !(t > time(0))) throw Error("SolveHistory::push: timestamps must increase strictly");
  buffer_[head_] = {theta, t};
  head_ = (head_ + 1) % capacity();
  size_ = std::min(size_ + 1, capacity());
}

const JointVector& SolveHistory::theta(std::size_t k) const {
  if (k >= size_) throw Error("SolveHistory: sample index out of range");
  return buffer_[(head_ + capacity() - 1 - k) % capacity()].first;
}

double SolveHistory::time(std::size_t k) const {
  if (k >= size_) throw Error("SolveHistory: sample index out of range");
  return buffer_[(head_ + capacity() - 1 - k) % capacity()].second;
}

// ---------------------------------------------------------------------------

double collision_cost(std::span<const ActiveObstacle> active, std::span<const Capsule> links, double epsilon,
                      double delta_min) {
  double sum = 0.0;
  for (const auto& obj : active)
    for (const auto& link : links)
      sum += collision_pair_cost(distance(obj.shape, obj.transform, Shape{link}, {}), epsilon, delta_min);
  return sum;
}

double self_collision_cost(std::span<const Capsule> links, double epsilon, double delta_min) {
  double sum = 0.0;
  for (std::size_t i = 0; i < links.size(); ++i)
    for (std::size_t j = i + 2; j < links.size(); ++j)
      sum += collision_pair_cost(distance(Shape{links[i]}, {}, Shape{links[j]}, {}), epsilon, delta_min);
  return sum;
}

double self_min_distance(std::span<const Capsule> links) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < links.size(); ++i)
    for (std::size_t j = i + 2; j < links.size(); ++j)
      best = std::min(best, distance(Shape{links[i]}, {}, Shape{links[j]}, {}));
  return best;
}

namespace {

// Kinematics of the candidate, computed once per objective evaluation.
struct CandidateState {
  const RobotModel& model;
  const JointVector& theta;
  KinematicsResult fk;
  std::vector<Capsule> links;

  CandidateState(const RobotModel& m, const JointVector& th) : model(m), theta(th), fk(m.forward_kinematics(th)) {
    links = m.link_shapes(fk);
  }
};

double difference_norm(const EvalContext& ctx, const JointVector& theta, int order) {
  const auto& h = ctx.history;
  const double dt = h.nominal_dt();
  // Nested differences so equal samples cancel exactly.
  const JointVector d0 = theta - h.theta(0);
  if (order == 1) return d0.norm() / dt;
  const JointVector d1 = h.theta(0) - h.theta(1);
  if (order == 2) return (d0 - d1).norm() / (dt * dt);
  const JointVector d2 = h.theta(1) - h.theta(2);
  return ((d0 - d1) - (d1 - d2)).norm() / (dt * dt * dt);
}

const Pose& require_goal(const EvalContext& ctx) {
  if (!ctx.goal) throw Error("pose term evaluated without a goal");
  return *ctx.goal;
}

double evaluate_term(TermKind kind, const ObjectiveSpec& spec, const EvalContext& ctx, const CandidateState& st) {
  switch (kind) {
    case TermKind::EePosition:
      return (st.fk.end_effector.position - require_goal(ctx).position).norm();
    case TermKind::EeOrientation:
      return rotation_angle_between(st.fk.end_effector.orientation, require_goal(ctx).orientation);
    case TermKind::MinVelocity:
      return difference_norm(ctx, st.theta, 1);
    case TermKind::MinAcceleration:
      return difference_norm(ctx, st.theta, 2);
    case TermKind::MinJerk:
      return difference_norm(ctx, st.theta, 3);
    case TermKind::SelfCollision:
      return self_collision_cost(st.links, spec.epsilon, spec.delta_min);
    case TermKind::EnvCollision:
      return collision_cost(ctx.active, st.links, spec.epsilon, spec.delta_min);
    case TermKind::SingularityPenalty: {
      const double m = manipulability(st.model, st.theta);
      return std::max(0.0, spec.manipulability_min - m) / spec.manipulability_min;
    }
  }
  return 0.0;
}

}  // namespace

double term_value(TermKind kind, const ObjectiveSpec& spec, const EvalContext& ctx, const JointVector& theta) {
  const CandidateState st(ctx.model, theta);
  return evaluate_term(kind, spec, ctx, st);
}

double objective(const ObjectiveSpec& spec, const EvalContext& ctx, const JointVector& theta) {
  const CandidateState st(ctx.model, theta);
  double f = 0.0;
  for (const auto& term : spec.terms) {
    if (term.weight == 0.0) continue;
    f += term.weight * groove_loss(evaluate_term(term.kind, spec, ctx, st), term.groove);
  }
  return f;
}

double adaptive_ramp(double min_distance, double epsilon, double d_hi) {
  return std::clamp((min_distance - epsilon) / (d_hi - epsilon), 0.0, 1.0);
}

ObjectiveSpec adapt_weights(const ObjectiveSpec& standard, double min_distance) {
  ObjectiveSpec out = standard;
  if (standard.adaptive != AdaptivePolicy::CikA) return out;
  if (auto* t = out.find(TermKind::EeOrientation))
    t->weight = standard.find(TermKind::EeOrientation)->weight *
                adaptive_ramp(min_distance, standard.epsilon, standard.d_hi);
  return out;
}

}  // namespace cik
