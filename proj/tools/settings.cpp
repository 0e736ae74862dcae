#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "collision_ik/error.hpp"

namespace cik::cli {

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open settings file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(path + ": settings must be a JSON object");

  Settings s;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "objective") {
      s.objective = parse_objective_spec(it->dump());
    } else if (key == "solver") {
      s.solver = parse_solver_settings(it->dump());
    } else if (key == "rate_hz") {
      if (!it->is_number()) throw ValidationError("rate_hz", "must be a number");
      const double hz = it->get<double>();
      if (!(hz > 0.0 && hz <= 10000.0)) throw ValidationError("rate_hz", "out of range (0, 10000]");
      s.rate_hz = hz;
    } else if (key == "variant") {
      if (!it->is_string()) throw ValidationError("variant", "must be a string");
      s.variant = parse_variant(it->get<std::string>());
    } else {
      throw ValidationError(key, "unknown settings section");
    }
  }
  return s;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string word;
  while (in >> word) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(word, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != word.size() || !std::isfinite(v)) throw ParseError("not a finite number: '" + word + "'");
    out.push_back(v);
  }
  return out;
}

Pose parse_pose(const std::string& text) {
  const auto v = parse_numbers(text);
  if (v.size() != 7) throw ParseError("goal needs 7 numbers (x y z qw qx qy qz), got " + std::to_string(v.size()));
  Quat q(v[3], v[4], v[5], v[6]);
  if (std::abs(q.norm() - 1.0) > 1e-6) throw ValidationError("goal", "quaternion must have unit norm");
  q.normalize();
  return {Vec3(v[0], v[1], v[2]), q};
}

Variant parse_variant(const std::string& name) {
  const auto v = variant_from_string(name);
  if (!v) throw ValidationError("variant", "unknown variant '" + name + "'");
  return *v;
}

}  // namespace cik::cli
