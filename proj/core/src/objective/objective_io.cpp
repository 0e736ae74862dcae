#include "collision_ik/error.hpp"
#include "collision_ik/objective/objective.hpp"
#include "json_helpers.hpp"

namespace cik {

using nlohmann::json;

ObjectiveSpec parse_objective_spec(std::string_view document) {
  const json doc = detail::parse_json(document);
  // A bare array is accepted as the term list with default scalars.
  const json* terms = &doc;
  ObjectiveSpec spec;
  spec.terms.clear();
  if (doc.is_object()) {
    terms = &detail::require_field(doc, "terms", "");
    spec.epsilon = detail::optional<double>(doc, "epsilon", "", spec.epsilon);
    spec.delta_min = detail::optional<double>(doc, "delta_min", "", spec.delta_min);
    spec.d_hi = detail::optional<double>(doc, "d_hi", "", spec.d_hi);
    spec.manipulability_min = detail::optional<double>(doc, "manipulability_min", "", spec.manipulability_min);
    const std::string adaptive = detail::optional<std::string>(doc, "adaptive", "", "off");
    if (adaptive == "off")
      spec.adaptive = AdaptivePolicy::Off;
    else if (adaptive == "cik_a")
      spec.adaptive = AdaptivePolicy::CikA;
    else
      throw ValidationError("adaptive", "expected 'off' or 'cik_a'");
  } else if (!doc.is_array()) {
    throw ParseError("objective: expected an object or an array of terms");
  }
  if (!terms->is_array()) throw ParseError("terms: expected an array");
  for (std::size_t i = 0; i < terms->size(); ++i) {
    const json& t = (*terms)[i];
    const std::string path = "terms[" + std::to_string(i) + "]";
    const std::string kind = detail::require<std::string>(t, "kind", path);
    const auto k = term_kind_from_string(kind);
    if (!k) throw ValidationError(path + ".kind", "unknown term kind '" + kind + "'");
    ObjectiveTerm term{*k, detail::require<double>(t, "weight", path), {}};
    if (const auto* d = ObjectiveSpec::defaults().find(*k)) term.groove = d->groove;
    if (t.contains("groove")) {
      const json& g = t.at("groove");
      const std::string gp = path + ".groove";
      term.groove.n = detail::optional<int>(g, "n", gp, term.groove.n);
      term.groove.s = detail::optional<double>(g, "s", gp, term.groove.s);
      term.groove.c = detail::optional<double>(g, "c", gp, term.groove.c);
      term.groove.r = detail::optional<double>(g, "r", gp, term.groove.r);
    }
    spec.terms.push_back(term);
  }
  spec.validate();
  return spec;
}

ObjectiveSpec load_objective_spec(const std::string& path) { return parse_objective_spec(detail::read_file(path)); }

std::string serialize_objective_spec(const ObjectiveSpec& spec) {
  json terms = json::array();
  for (const auto& t : spec.terms)
    terms.push_back({{"kind", std::string(to_string(t.kind))},
                     {"weight", t.weight},
                     {"groove", {{"n", t.groove.n}, {"s", t.groove.s}, {"c", t.groove.c}, {"r", t.groove.r}}}});
  const json doc = {{"terms", terms},
                    {"epsilon", spec.epsilon},
                    {"delta_min", spec.delta_min},
                    {"adaptive", spec.adaptive == AdaptivePolicy::CikA ? "cik_a" : "off"},
                    {"d_hi", spec.d_hi},
                    {"manipulability_min", spec.manipulability_min}};
  return doc.dump(2);
}

}  // namespace cik
