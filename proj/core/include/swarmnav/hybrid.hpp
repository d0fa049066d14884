#pragma once

#include <span>

#include "swarmnav/fmp.hpp"
#include "swarmnav/policy.hpp"

namespace swarmnav::hybrid {

/// Per-agent, per-step hard switch between the learned policy and the
/// force-based planner. FMP takes over when any of three predicates holds:
///   high_risk: surface distance to the nearest peer < activation radius
///   simple:    no peers in sensing range
///   stuck:     stay-in-place counter > c_stuck
/// checked in that order (the order only affects the logged reason; all
/// three dispatch to FMP). Both threshold comparisons are strict.

struct HybridConfig {
  int c_stuck = 20;
  void validate() const;
};

enum class Reason { high_risk, simple, stuck, normal };

const char* to_string(Reason r);

struct ModeChoice {
  ControllerMode mode = ControllerMode::policy;
  Reason reason = Reason::normal;
};

/// The bare truth table over the three predicates.
ModeChoice classify(bool high_risk, bool simple, bool stuck);

/// Evaluates the predicates on a snapshot. `peers` must be the active and
/// arrived agents within sensing range (collided bodies are obstacles, not
/// peers: they count for forces and observations but not for |N| or the
/// high-risk distance here).
ModeChoice select_mode(const AgentState& agent,
                       std::span<const ObservableState> peers,
                       int stuck_counter, const fmp::FmpConfig& fmp_cfg,
                       const HybridConfig& cfg);

struct Decision {
  Action action;
  ModeChoice choice;
};

/// Full dispatch for one agent of a running episode: selects the mode, then
/// either decodes the greedy policy action or runs the force planner (with
/// repulsion disabled when the reason is `simple`, pursuit only). The FMP
/// branch plans against every sensed body including collided ones.
Decision plan_action(const EpisodeState& state, int agent_index,
                     const policy::PolicyModel& model,
                     const policy::ActionSpace& space,
                     const fmp::FmpConfig& fmp_cfg, const HybridConfig& cfg);

}  // namespace swarmnav::hybrid
