#include "swarmnav/world.hpp"

#include <cmath>
#include <set>
#include <string>

#include "swarmnav/error.hpp"

namespace swarmnav {

void WorldConfig::validate() const {
  require(dimension == 2 || dimension == 3, ErrorCategory::config,
          "world dimension must be 2 or 3");
  require(extents.dim() == dimension, ErrorCategory::config,
          "world extents dimension does not match world dimension");
  require(extents.is_finite(), ErrorCategory::config,
          "world extents must be finite");
  for (int i = 0; i < dimension; ++i)
    require(extents[i] > 0.0, ErrorCategory::config,
            "world extents must be positive");
  require(std::isfinite(dt) && dt > 0.0, ErrorCategory::config,
          "time step must be positive");
  require(std::isfinite(t_max) && t_max >= dt, ErrorCategory::config,
          "episode horizon must cover at least one step");
  require(std::isfinite(neighbor_radius) && neighbor_radius > 0.0,
          ErrorCategory::config, "neighbor radius must be positive");
  require(std::isfinite(v_max_factor) && v_max_factor > 0.0,
          ErrorCategory::config, "v_max factor must be positive");
}

namespace {

void check_inside(const WorldConfig& w, const Vec& p, double radius,
                  const std::string& what, int id) {
  for (int i = 0; i < w.dimension; ++i) {
    if (p[i] - radius < -1e-12 || p[i] + radius > w.extents[i] + 1e-12)
      fail(ErrorCategory::config,
           what + " of agent " + std::to_string(id) +
               " leaves the workspace");
  }
}

}  // namespace

void validate_agents(const WorldConfig& world,
                     const std::vector<AgentState>& agents) {
  require(!agents.empty(), ErrorCategory::config,
          "scenario must contain at least one agent");
  std::set<int> seen;
  for (const auto& a : agents) {
    require(seen.insert(a.id).second, ErrorCategory::config,
            "duplicate agent id " + std::to_string(a.id));
    require(a.position.dim() == world.dimension &&
                a.goal.dim() == world.dimension &&
                a.velocity.dim() == world.dimension,
            ErrorCategory::config,
            "agent " + std::to_string(a.id) +
                " state dimension does not match world");
    require(a.position.is_finite() && a.goal.is_finite() &&
                a.velocity.is_finite() && std::isfinite(a.radius) &&
                std::isfinite(a.preferred_speed) &&
                std::isfinite(a.heading_psi) && std::isfinite(a.heading_phi),
            ErrorCategory::config,
            "agent " + std::to_string(a.id) + " has non-finite state");
    require(a.radius > 0.0, ErrorCategory::config,
            "agent " + std::to_string(a.id) + " radius must be positive");
    require(a.preferred_speed > 0.0, ErrorCategory::config,
            "agent " + std::to_string(a.id) +
                " preferred speed must be positive");
    require(a.velocity.norm() <= world.v_max(a.preferred_speed) + 1e-9,
            ErrorCategory::config,
            "agent " + std::to_string(a.id) +
                " initial speed exceeds its velocity cap");
    require(a.heading_psi > -3.1415926535897932 - 1e-9 &&
                a.heading_psi <= 3.1415926535897932 + 1e-9,
            ErrorCategory::config,
            "agent " + std::to_string(a.id) + " heading psi not normalized");
    require(a.heading_phi >= -1e-9 && a.heading_phi <= 3.1415926535897932 + 1e-9,
            ErrorCategory::config,
            "agent " + std::to_string(a.id) + " heading phi not in [0, pi]");
    check_inside(world, a.position, a.radius, "body", a.id);
    check_inside(world, a.goal, a.radius, "goal", a.id);
  }
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if (surface_distance(agents[i], agents[j]) <= 0.0)
        fail(ErrorCategory::config,
             "agents " + std::to_string(agents[i].id) + " and " +
                 std::to_string(agents[j].id) + " overlap at t=0");
    }
}

void Scenario::validate() const {
  world.validate();
  validate_agents(world, agents);
}

}  // namespace swarmnav
