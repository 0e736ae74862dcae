#include "collision_ik/harness/desk_robots.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "collision_ik/error.hpp"

namespace cik {

namespace {

enum Axis { Yaw, Pitch, Roll };

struct LinkDef {
  Axis axis;
  double offset;  // along the parent z axis to this joint, m
  double radius;  // capsule of the link this joint drives
  double lower, upper;
};

struct ArmDef {
  std::vector<LinkDef> links;
  double tool;  // last joint to tool point, m
  std::vector<double> home;
};

// Roll joints turn about the link axis; both yaw and roll are z in the
// joint frame, they differ only in where they sit on the chain.
Vec3 axis_vector(Axis a) { return a == Pitch ? Vec3::UnitY() : Vec3::UnitZ(); }

const ArmDef& arm(int dof) {
  // Middle links are long enough that links two apart clear each other by
  // about 0.09 m when straight.
  static const ArmDef six{{{Yaw, 0.10, 0.05, -M_PI, M_PI},
                           {Pitch, 0.12, 0.045, -2.0, 2.0},
                           {Pitch, 0.34, 0.04, -2.6, 2.6},
                           {Roll, 0.26, 0.035, -M_PI, M_PI},
                           {Pitch, 0.22, 0.03, -2.2, 2.2},
                           {Roll, 0.22, 0.03, -M_PI, M_PI}},
                          0.06,
                          {0.0, -0.073, 1.495, 0.0, 1.719, 0.0}};
  static const ArmDef seven{{{Yaw, 0.10, 0.05, -M_PI, M_PI},
                             {Pitch, 0.12, 0.045, -2.0, 2.0},
                             {Roll, 0.20, 0.04, -M_PI, M_PI},
                             {Pitch, 0.20, 0.04, -2.6, 2.6},
                             {Roll, 0.18, 0.035, -M_PI, M_PI},
                             {Pitch, 0.18, 0.03, -2.4, 2.4},
                             {Roll, 0.16, 0.03, -M_PI, M_PI}},
                            0.10,
                            {0.0, 0.23, 0.0, 1.34, 0.0, 1.57, 0.0}};
  static const ArmDef eight{{{Yaw, 0.10, 0.045, -M_PI, M_PI},
                             {Pitch, 0.12, 0.04, -2.0, 2.0},
                             {Roll, 0.16, 0.04, -M_PI, M_PI},
                             {Pitch, 0.16, 0.035, -2.6, 2.6},
                             {Roll, 0.16, 0.035, -M_PI, M_PI},
                             {Pitch, 0.16, 0.03, -2.4, 2.4},
                             {Roll, 0.16, 0.03, -M_PI, M_PI},
                             {Pitch, 0.16, 0.03, -2.2, 2.2}},
                            0.10,
                            {0.0, -0.15, 0.0, 1.24, 0.0, 1.31, 0.0, 0.75}};
  switch (dof) {
    case 6:
      return six;
    case 7:
      return seven;
    case 8:
      return eight;
  }
  throw ValidationError("dof", "desk robots exist for 6, 7 and 8 DOF");
}

}  // namespace

RobotModel desk_robot(int dof) {
  const ArmDef& def = arm(dof);
  std::vector<JointSpec> joints;
  std::vector<CapsuleSpec> capsules;
  for (std::size_t i = 0; i < def.links.size(); ++i) {
    const LinkDef& l = def.links[i];
    joints.push_back({JointKind::Revolute, axis_vector(l.axis), RigidTransform::from_translation(Vec3(0, 0, l.offset)),
                      l.lower, l.upper});
    const double next = i + 1 < def.links.size() ? def.links[i + 1].offset : def.tool;
    capsules.push_back({Vec3::Zero(), Vec3(0, 0, next), l.radius});
  }
  return RobotModel("desk" + std::to_string(dof), std::move(joints), std::move(capsules),
                    RigidTransform::from_translation(Vec3(0, 0, def.tool)));
}

JointVector desk_home(const RobotModel& model) {
  const int dof = model.dof();
  if (model.name() == "desk" + std::to_string(dof) && dof >= 6 && dof <= 8) {
    const auto& h = arm(dof).home;
    return Eigen::Map<const JointVector>(h.data(), static_cast<Eigen::Index>(h.size()));
  }
  // Foreign model: the middle of each joint range.
  return 0.5 * (model.lower_bounds() + model.upper_bounds());
}

RobotModel resolve_robot(const std::string& name_or_path) {
  for (int dof : {6, 7, 8})
    if (name_or_path == "desk" + std::to_string(dof)) return desk_robot(dof);
  return load_robot_model(name_or_path);
}

std::vector<Vec3> blob_point_cloud(std::size_t vertices, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI), amp(0.05, 0.2);
  // A few low-order bumps on the unit sphere make the surface lumpy.
  struct Bump {
    Vec3 dir;
    double amp, freq, phase;
  };
  std::vector<Bump> bumps;
  std::normal_distribution<double> n01;
  for (int k = 0; k < 6; ++k) {
    Vec3 d(n01(rng), n01(rng), n01(rng));
    bumps.push_back({d.normalized(), amp(rng), 1.0 + static_cast<double>(k % 3), phase(rng)});
  }
  std::vector<Vec3> out;
  out.reserve(vertices);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < vertices; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(vertices);
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 u(r * std::cos(golden * static_cast<double>(i)), r * std::sin(golden * static_cast<double>(i)), z);
    double scale = 1.0;
    for (const auto& b : bumps) scale += b.amp * std::sin(b.freq * M_PI * u.dot(b.dir) + b.phase);
    out.push_back(u * (radius * scale / 1.4));
  }
  return out;
}

std::vector<Vec3> load_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  const bool obj = path.size() >= 4 && path.compare(path.size() - 4, 4, ".obj") == 0;
  std::vector<Vec3> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    if (obj) {
      std::string tag;
      if (!(ss >> tag) || tag != "v") continue;
    }
    double x, y, z;
    if (ss >> x >> y >> z) out.emplace_back(x, y, z);
  }
  if (out.empty()) throw ParseError(path + ": no points");
  return out;
}

}  // namespace cik
