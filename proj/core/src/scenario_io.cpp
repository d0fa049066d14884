#include "swarmnav/scenario_io.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"

namespace swarmnav {

using detail::json;

namespace {

constexpr const char* kScenarioFormat = "swarmnav-scenario/1";
constexpr const char* kScenarioSetFormat = "swarmnav-scenario-set/1";
constexpr double kPi = 3.141592653589793;
constexpr double kHalfPi = 1.5707963267948966;

json world_to_json(const WorldConfig& w) {
  json j;
  j["dimension"] = w.dimension;
  j["extents"] = detail::vec_to_json(w.extents);
  j["dt"] = w.dt;
  j["t_max"] = w.t_max;
  j["neighbor_radius"] = w.neighbor_radius;
  j["v_max_factor"] = w.v_max_factor;
  return j;
}

WorldConfig world_from_json(const json& j) {
  detail::check_known_keys(j,
                           {"dimension", "extents", "dt", "t_max",
                            "neighbor_radius", "v_max_factor"},
                           "world");
  WorldConfig w;
  const json& dim = detail::require_key(j, "dimension", "world");
  if (!dim.is_number_integer())
    fail(ErrorCategory::config, "world.dimension must be an integer");
  w.dimension = dim.get<int>();
  require(w.dimension == 2 || w.dimension == 3, ErrorCategory::config,
          "world.dimension must be 2 or 3");
  w.extents = detail::vec_from_json(detail::require_key(j, "extents", "world"),
                                    w.dimension, "world.extents");
  if (j.contains("dt")) w.dt = detail::as_number(j["dt"], "world.dt");
  if (j.contains("t_max"))
    w.t_max = detail::as_number(j["t_max"], "world.t_max");
  if (j.contains("neighbor_radius"))
    w.neighbor_radius =
        detail::as_number(j["neighbor_radius"], "world.neighbor_radius");
  if (j.contains("v_max_factor"))
    w.v_max_factor = detail::as_number(j["v_max_factor"], "world.v_max_factor");
  return w;
}

json agent_to_json(const AgentState& a, int dimension) {
  json j;
  j["id"] = a.id;
  j["position"] = detail::vec_to_json(a.position);
  j["velocity"] = detail::vec_to_json(a.velocity);
  j["goal"] = detail::vec_to_json(a.goal);
  j["radius"] = a.radius;
  j["preferred_speed"] = a.preferred_speed;
  json heading = json::array({a.heading_psi});
  if (dimension == 3) heading.push_back(a.heading_phi);
  j["heading"] = heading;
  j["status"] = to_string(a.status);
  return j;
}

AgentStatus status_from_string(const std::string& s,
                               const std::string& context) {
  if (s == "active") return AgentStatus::active;
  if (s == "arrived") return AgentStatus::arrived;
  if (s == "collided") return AgentStatus::collided;
  fail(ErrorCategory::config, context + ": unknown status \"" + s + "\"");
}

AgentState agent_from_json(const json& j, int dimension) {
  detail::check_known_keys(j,
                           {"id", "position", "velocity", "goal", "radius",
                            "preferred_speed", "heading", "status"},
                           "agent");
  AgentState a;
  const json& id = detail::require_key(j, "id", "agent");
  if (!id.is_number_integer())
    fail(ErrorCategory::config, "agent.id must be an integer");
  a.id = id.get<int>();
  std::string ctx = "agent " + std::to_string(a.id);
  a.position = detail::vec_from_json(
      detail::require_key(j, "position", ctx), dimension, ctx + ".position");
  a.goal = detail::vec_from_json(detail::require_key(j, "goal", ctx),
                                 dimension, ctx + ".goal");
  a.velocity = j.contains("velocity")
                   ? detail::vec_from_json(j["velocity"], dimension,
                                           ctx + ".velocity")
                   : Vec::zero(dimension);
  a.radius = detail::as_number(detail::require_key(j, "radius", ctx),
                               ctx + ".radius");
  a.preferred_speed =
      detail::as_number(detail::require_key(j, "preferred_speed", ctx),
                        ctx + ".preferred_speed");
  a.heading_phi = kHalfPi;
  if (j.contains("heading")) {
    const json& h = j["heading"];
    std::size_t want = dimension == 2 ? 1 : 2;
    if (!h.is_array() || h.size() != want)
      fail(ErrorCategory::config,
           ctx + ".heading: expected " + std::to_string(want) + " angle(s)");
    a.heading_psi =
        std::remainder(detail::as_number(h[0], ctx + ".heading"), 2.0 * kPi);
    if (dimension == 3) a.heading_phi = detail::as_number(h[1], ctx + ".heading");
  } else {
    // Default heading: face the goal (or +x when already on it).
    Vec to_goal = (a.goal - a.position).normalized_or_zero();
    if (to_goal.norm_sq() > 0.0) {
      a.heading_psi = std::atan2(to_goal.y(), to_goal.x());
      if (dimension == 3) {
        double z = std::clamp(to_goal.z(), -1.0, 1.0);
        a.heading_phi = std::acos(z);
      }
    } else {
      a.heading_psi = 0.0;
    }
  }
  if (j.contains("status"))
    a.status = status_from_string(j["status"].get<std::string>(), ctx);
  return a;
}

json scenario_to_json_obj(const Scenario& s) {
  json j;
  j["format"] = kScenarioFormat;
  j["label"] = s.label;
  j["seed"] = s.seed;
  j["world"] = world_to_json(s.world);
  json agents = json::array();
  for (const auto& a : s.agents) agents.push_back(agent_to_json(a, s.world.dimension));
  j["agents"] = agents;
  return j;
}

Scenario scenario_from_json_obj(const json& j) {
  detail::check_known_keys(j, {"format", "label", "seed", "world", "agents"},
                           "scenario");
  const json& fmt = detail::require_key(j, "format", "scenario");
  if (fmt.get<std::string>() != kScenarioFormat)
    fail(ErrorCategory::config,
         "scenario: unsupported format \"" + fmt.get<std::string>() + "\"");
  Scenario s;
  if (j.contains("label")) s.label = j["label"].get<std::string>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  s.world = world_from_json(detail::require_key(j, "world", "scenario"));
  const json& agents = detail::require_key(j, "agents", "scenario");
  if (!agents.is_array())
    fail(ErrorCategory::config, "scenario.agents must be an array");
  for (const auto& a : agents)
    s.agents.push_back(agent_from_json(a, s.world.dimension));
  s.validate();
  return s;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  return scenario_to_json_obj(s).dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  return scenario_from_json_obj(detail::parse_json(text, "scenario"));
}

std::string scenarios_to_json(std::span<const Scenario> set) {
  json j;
  j["format"] = kScenarioSetFormat;
  json arr = json::array();
  for (const auto& s : set) arr.push_back(scenario_to_json_obj(s));
  j["scenarios"] = arr;
  return j.dump(2) + "\n";
}

std::vector<Scenario> scenarios_from_json(const std::string& text) {
  json j = detail::parse_json(text, "scenario set");
  detail::check_known_keys(j, {"format", "scenarios"}, "scenario set");
  const json& fmt = detail::require_key(j, "format", "scenario set");
  if (fmt.get<std::string>() != kScenarioSetFormat)
    fail(ErrorCategory::config,
         "scenario set: unsupported format \"" + fmt.get<std::string>() +
             "\"");
  const json& arr = detail::require_key(j, "scenarios", "scenario set");
  if (!arr.is_array())
    fail(ErrorCategory::config, "scenario set: scenarios must be an array");
  std::vector<Scenario> out;
  out.reserve(arr.size());
  for (const auto& s : arr) out.push_back(scenario_from_json_obj(s));
  return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(detail::read_text_file(path));
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  detail::write_text_file(path, scenario_to_json(s));
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  return scenarios_from_json(detail::read_text_file(path));
}

void save_scenarios(std::span<const Scenario> set,
                    const std::filesystem::path& path) {
  detail::write_text_file(path, scenarios_to_json(set));
}

}  // namespace swarmnav
