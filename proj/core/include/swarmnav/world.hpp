#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmnav/agent.hpp"

namespace swarmnav {

/// Static description of one workspace: bounds, timing, sensing.
/// `extents` spans [0, Lx] x [0, Ly] (x [0, Lz] in 3D).
struct WorldConfig {
  int dimension = 2;
  Vec extents = Vec(8.0, 8.0);   // m
  double dt = 0.1;               // s
  double t_max = 50.0;           // s, episode horizon
  double neighbor_radius = 4.0;  // m, center-to-center sensing range
  double v_max_factor = 1.0;     // v_max = v_max_factor * v_pref

  static WorldConfig default_2d() { return WorldConfig{}; }
  static WorldConfig default_3d() {
    WorldConfig w;
    w.dimension = 3;
    w.extents = Vec(8.0, 8.0, 4.0);
    return w;
  }

  int max_steps() const {
    return static_cast<int>(t_max / dt + 1e-9);
  }

  double v_max(double preferred_speed) const {
    return v_max_factor * preferred_speed;
  }

  void validate() const;
};

/// One reproducible episode setup: a world plus fully specified agents.
struct Scenario {
  std::string label;
  std::uint64_t seed = 0;  // seed used to generate it, 0 for hand-built
  WorldConfig world;
  std::vector<AgentState> agents;

  void validate() const;
};

/// Throws ErrorCategory::config when positions/goals leave the workspace,
/// bodies overlap at t=0, or per-agent parameters are out of range.
void validate_agents(const WorldConfig& world,
                     const std::vector<AgentState>& agents);

}  // namespace swarmnav
