#include "swarmnav/hybrid.hpp"

namespace swarmnav::hybrid {

void HybridConfig::validate() const {
  require(c_stuck >= 1, ErrorCategory::config, "c_stuck must be >= 1");
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::high_risk: return "high_risk";
    case Reason::simple: return "simple";
    case Reason::stuck: return "stuck";
    case Reason::normal: return "normal";
  }
  return "unknown";
}

ModeChoice classify(bool high_risk, bool simple, bool stuck) {
  if (high_risk) return {ControllerMode::fmp, Reason::high_risk};
  if (simple) return {ControllerMode::fmp, Reason::simple};
  if (stuck) return {ControllerMode::fmp, Reason::stuck};
  return {ControllerMode::policy, Reason::normal};
}

ModeChoice select_mode(const AgentState& agent,
                       std::span<const ObservableState> peers,
                       int stuck_counter, const fmp::FmpConfig& fmp_cfg,
                       const HybridConfig& cfg) {
  cfg.validate();
  double threshold =
      fmp::activation_radius(agent.preferred_speed, fmp_cfg.rho);
  bool high_risk = min_surface_distance(agent, peers) < threshold;
  bool simple = peers.empty();
  bool stuck = stuck_counter > cfg.c_stuck;
  return classify(high_risk, simple, stuck);
}

Decision plan_action(const EpisodeState& state, int agent_index,
                     const policy::PolicyModel& model,
                     const policy::ActionSpace& space,
                     const fmp::FmpConfig& fmp_cfg, const HybridConfig& cfg) {
  require(agent_index >= 0 &&
              agent_index < static_cast<int>(state.agents.size()),
          ErrorCategory::config, "agent index out of range");
  const AgentState& agent =
      state.agents[static_cast<std::size_t>(agent_index)];
  require(model.dimension == state.world.dimension, ErrorCategory::model,
          "model dimension does not match the world");
  require(space.dimension() == state.world.dimension, ErrorCategory::model,
          "action space dimension does not match the world");

  std::vector<ObservableState> peers = sensed_peers(state, agent_index);
  ModeChoice choice = select_mode(
      agent, peers, state.stuck_counters[static_cast<std::size_t>(agent_index)],
      fmp_cfg, cfg);

  Decision d;
  d.choice = choice;
  if (choice.mode == ControllerMode::fmp) {
    std::vector<ObservableState> bodies = sensed_bodies(state, agent_index);
    d.action = fmp::plan_action(agent, bodies, fmp_cfg, state.world.dt,
                                state.world.v_max(agent.preferred_speed),
                                /*with_repulsion=*/choice.reason !=
                                    Reason::simple);
  } else {
    std::vector<double> obs = observe(state, agent.id);
    int idx = policy::greedy_action(model.forward(obs).probs);
    d.action = space.decode(idx, agent.preferred_speed);
  }
  return d;
}

}  // namespace swarmnav::hybrid
