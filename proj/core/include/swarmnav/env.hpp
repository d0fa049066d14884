#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "swarmnav/world.hpp"

namespace swarmnav {

/// One control decision: new speed plus heading changes. dphi must be 0 in 2D.
struct Action {
  double speed = 0.0;  // m/s, in [0, v_pref]
  double dpsi = 0.0;   // rad, |dpsi| <= kMaxHeadingStep
  double dphi = 0.0;   // rad, |dphi| <= kMaxHeadingStep, 3D only
};

/// Per-step heading-change cap shared by every planner: the discrete action
/// set never turns faster than this, and force-based commands are clamped to
/// the same cap so planner comparisons stay fair.
inline constexpr double kMaxHeadingStep = 0.5235987755982988;  // pi/6

/// Displacement below this per step counts as "staying in place" for the
/// stuck counter (10% of the smallest agent radius at the testing dt).
inline constexpr double kMoveEpsilon = 0.02;  // m

/// Number of neighbor slots in an observation vector.
inline constexpr int kObservedNeighbors = 4;

/// Goals cannot be hit exactly in discrete time; tolerance scales with size.
inline double arrival_tolerance(double radius) {
  return std::max(0.1, 0.5 * radius);
}

enum class ControllerMode { policy, fmp };

inline const char* to_string(ControllerMode m) {
  return m == ControllerMode::policy ? "policy" : "fmp";
}

struct AgentCommand {
  int agent_id = 0;
  Action action;
  ControllerMode mode = ControllerMode::policy;  // provenance tag for logs
};

/// Snapshot of one agent inside a trajectory record.
struct StepAgentRecord {
  int id = 0;
  Vec position;
  Vec velocity;
  double heading_psi = 0.0;
  double heading_phi = 0.0;
  AgentStatus status = AgentStatus::active;
  double min_surface = 0.0;  // vs all other bodies; +inf when alone
  ControllerMode mode = ControllerMode::policy;
};

struct StepRecord {
  double t = 0.0;
  std::vector<StepAgentRecord> agents;
};

/// Mutable episode. Single-owner: step() mutates it sequentially; distinct
/// episodes share nothing and can run on different threads.
struct EpisodeState {
  WorldConfig world;
  std::vector<AgentState> agents;
  double t = 0.0;
  int step_count = 0;
  std::vector<int> stuck_counters;           // per agent, >= 0
  std::vector<ControllerMode> last_modes;    // last commanded mode per agent
  std::vector<double> arrival_times;         // s; NaN until arrived
  bool record_trajectory = true;
  std::vector<StepRecord> trajectory;        // includes the t=0 snapshot

  /// Validates the scenario and builds the initial state (with t=0 record).
  static EpisodeState start(const Scenario& scenario,
                            bool record_trajectory = true);

  int index_of(int agent_id) const;  // throws on unknown id
  int active_count() const;
};

/// What one step did to each agent; consumed by reward computation and
/// benchmark bookkeeping. Ordered like EpisodeState::agents.
struct AgentStepEffect {
  int id = 0;
  bool was_active = false;
  double goal_dist_before = 0.0;
  double goal_dist_after = 0.0;
  double min_surface_after = 0.0;  // vs all other bodies; +inf when alone
  bool newly_arrived = false;
  bool newly_collided = false;
};

struct StepEffects {
  std::vector<AgentStepEffect> agents;
};

/// Advances the world by one dt. Exactly one command per active agent
/// (commands for frozen agents, duplicates, or missing agents are rejected).
/// Active agents turn by (dpsi, dphi) capped at kMaxHeadingStep, take
/// velocity = speed along the new heading, and move by dt*velocity; then
/// collisions are marked (symmetric, absorbing, checked against every
/// not-yet-collided body), then arrivals, then stuck counters update.
/// Collision precedence: an agent that overlaps and reaches its goal in the
/// same step is collided, not arrived.
StepEffects step(EpisodeState& state, std::span<const AgentCommand> commands);

/// All other bodies (any status) within neighbor_radius of the agent,
/// sorted by ascending surface distance, ties by id. This is the sensing
/// set used for observations and force computation; collided bodies remain
/// physical obstacles.
std::vector<ObservableState> sensed_bodies(const EpisodeState& state,
                                           int agent_index);

/// Like sensed_bodies but restricted to active/arrived agents: the peer set
/// whose emptiness defines a "simple" situation for the mode switch.
std::vector<ObservableState> sensed_peers(const EpisodeState& state,
                                          int agent_index);

/// Fixed-length observation: ego block (goal distance, v_pref, radius,
/// heading direction in the ego goal frame) then kObservedNeighbors blocks
/// (relative position and velocity in the goal frame, neighbor radius,
/// combined radius, surface distance, presence flag), nearest first,
/// zero-padded. Lengths: 37 in 2D, 46 in 3D.
std::vector<double> observe(const EpisodeState& state, int agent_id);

int observation_length(int dimension);

enum class AgentOutcome { success, collision, stuck };
enum class ScenarioOutcome { success, collision, stuck };

inline const char* to_string(AgentOutcome o) {
  switch (o) {
    case AgentOutcome::success: return "success";
    case AgentOutcome::collision: return "collision";
    case AgentOutcome::stuck: return "stuck";
  }
  return "unknown";
}

inline const char* to_string(ScenarioOutcome o) {
  switch (o) {
    case ScenarioOutcome::success: return "success";
    case ScenarioOutcome::collision: return "collision";
    case ScenarioOutcome::stuck: return "stuck";
  }
  return "unknown";
}

/// done when every agent is terminal or t has reached t_max. Outcomes:
/// arrived agents are successes, collided are collisions, agents still
/// active at the horizon are stuck. Scenario label: collision beats stuck
/// beats success.
struct TerminationReport {
  bool done = false;
  std::vector<AgentOutcome> outcomes;
  ScenarioOutcome scenario = ScenarioOutcome::success;
};

TerminationReport episode_terminated(const EpisodeState& state);

/// Trajectory as JSON-lines: one schema header line, then one line per
/// StepRecord. Deterministic formatting.
std::string trajectory_jsonl(const EpisodeState& state);

}  // namespace swarmnav
