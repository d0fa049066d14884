#include "swarmnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "io_util.hpp"

namespace swarmnav {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kHalfPi = 1.5707963267948966;

double wrap_angle(double a) {
  // (-pi, pi]; remainder lands in [-pi, pi], fold the single endpoint.
  double r = std::remainder(a, 2.0 * kPi);
  return r <= -kPi ? kPi : r;
}

double min_surface_vs_all(const EpisodeState& s, std::size_t i) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.agents.size(); ++j) {
    if (j == i) continue;
    best = std::min(best, surface_distance(s.agents[i], s.agents[j]));
  }
  return best;
}

void append_record(EpisodeState& s) {
  if (!s.record_trajectory) return;
  StepRecord rec;
  rec.t = s.t;
  rec.agents.reserve(s.agents.size());
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentState& a = s.agents[i];
    rec.agents.push_back(StepAgentRecord{a.id, a.position, a.velocity,
                                         a.heading_psi, a.heading_phi,
                                         a.status, min_surface_vs_all(s, i),
                                         s.last_modes[i]});
  }
  s.trajectory.push_back(std::move(rec));
}

void validate_action(const AgentState& a, const Action& act, int dimension) {
  const double speed_tol = 1e-9 * std::max(1.0, a.preferred_speed);
  require(std::isfinite(act.speed) && act.speed >= -speed_tol &&
              act.speed <= a.preferred_speed + speed_tol,
          ErrorCategory::config,
          "action speed out of [0, v_pref] for agent " + std::to_string(a.id));
  require(std::isfinite(act.dpsi) &&
              std::abs(act.dpsi) <= kMaxHeadingStep + 1e-9,
          ErrorCategory::config,
          "action dpsi exceeds the per-step cap for agent " +
              std::to_string(a.id));
  if (dimension == 2) {
    require(act.dphi == 0.0, ErrorCategory::config,
            "2D action must have dphi = 0 for agent " + std::to_string(a.id));
  } else {
    require(std::isfinite(act.dphi) &&
                std::abs(act.dphi) <= kMaxHeadingStep + 1e-9,
            ErrorCategory::config,
            "action dphi exceeds the per-step cap for agent " +
                std::to_string(a.id));
  }
}

}  // namespace

EpisodeState EpisodeState::start(const Scenario& scenario,
                                 bool record_trajectory) {
  scenario.validate();
  EpisodeState s;
  s.world = scenario.world;
  s.agents = scenario.agents;
  s.t = 0.0;
  s.step_count = 0;
  s.stuck_counters.assign(s.agents.size(), 0);
  s.last_modes.assign(s.agents.size(), ControllerMode::policy);
  s.arrival_times.assign(s.agents.size(),
                         std::numeric_limits<double>::quiet_NaN());
  s.record_trajectory = record_trajectory;
  // Agents seeded directly on their goal count as arrived at t=0.
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    AgentState& a = s.agents[i];
    if (a.status == AgentStatus::active &&
        a.goal_distance() <= arrival_tolerance(a.radius)) {
      a.status = AgentStatus::arrived;
      a.velocity = Vec::zero(s.world.dimension);
      s.arrival_times[i] = 0.0;
    }
    if (a.status == AgentStatus::arrived) s.arrival_times[i] = 0.0;
  }
  append_record(s);
  return s;
}

int EpisodeState::index_of(int agent_id) const {
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (agents[i].id == agent_id) return static_cast<int>(i);
  fail(ErrorCategory::config, "unknown agent id " + std::to_string(agent_id));
}

int EpisodeState::active_count() const {
  int n = 0;
  for (const auto& a : agents)
    if (a.status == AgentStatus::active) ++n;
  return n;
}

StepEffects step(EpisodeState& state, std::span<const AgentCommand> commands) {
  const int dim = state.world.dimension;
  const std::size_t n = state.agents.size();

  // Map commands to agents; exactly one per active agent.
  std::vector<const AgentCommand*> per_agent(n, nullptr);
  for (const auto& c : commands) {
    int idx = state.index_of(c.agent_id);
    require(state.agents[idx].status == AgentStatus::active,
            ErrorCategory::config,
            "command issued to non-active agent " + std::to_string(c.agent_id));
    require(per_agent[idx] == nullptr, ErrorCategory::config,
            "duplicate command for agent " + std::to_string(c.agent_id));
    per_agent[idx] = &c;
  }
  for (std::size_t i = 0; i < n; ++i)
    require(state.agents[i].status != AgentStatus::active ||
                per_agent[i] != nullptr,
            ErrorCategory::config,
            "missing command for active agent " +
                std::to_string(state.agents[i].id));

  StepEffects effects;
  effects.agents.resize(n);

  std::vector<Vec> prev_positions;
  prev_positions.reserve(n);
  for (const auto& a : state.agents) prev_positions.push_back(a.position);

  // Kinematics: all moves computed from the pre-step snapshot, applied at
  // once. Frozen agents keep zero velocity and do not move.
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = state.agents[i];
    auto& eff = effects.agents[i];
    eff.id = a.id;
    eff.was_active = a.status == AgentStatus::active;
    eff.goal_dist_before = a.goal_distance();
    if (!eff.was_active) continue;

    const AgentCommand& cmd = *per_agent[i];
    validate_action(a, cmd.action, dim);
    double speed = std::clamp(cmd.action.speed, 0.0, a.preferred_speed);
    double dpsi = std::clamp(cmd.action.dpsi, -kMaxHeadingStep, kMaxHeadingStep);
    a.heading_psi = wrap_angle(a.heading_psi + dpsi);
    if (dim == 3) {
      double dphi =
          std::clamp(cmd.action.dphi, -kMaxHeadingStep, kMaxHeadingStep);
      a.heading_phi = std::clamp(a.heading_phi + dphi, 0.0, kPi);
    } else {
      a.heading_phi = kHalfPi;
    }
    a.velocity = speed * heading_direction(dim, a.heading_psi, a.heading_phi);
    a.position += state.world.dt * a.velocity;
    state.last_modes[i] = cmd.mode;
  }

  // Collisions: symmetric, absorbing. Pairs where both bodies were already
  // collided are skipped; a fresh overlap with a frozen body still collides
  // the mover, and the frozen body keeps its earlier status.
  std::vector<bool> was_collided(n);
  for (std::size_t i = 0; i < n; ++i)
    was_collided[i] = state.agents[i].status == AgentStatus::collided;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (was_collided[i] && was_collided[j]) continue;
      if (surface_distance(state.agents[i], state.agents[j]) < 0.0) {
        for (std::size_t k : {i, j}) {
          if (state.agents[k].status != AgentStatus::collided) {
            state.agents[k].status = AgentStatus::collided;
            state.agents[k].velocity = Vec::zero(dim);
            effects.agents[k].newly_collided = true;
          }
        }
      }
    }
  }

  // Arrivals for agents that survived the collision pass.
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = state.agents[i];
    if (a.status != AgentStatus::active) continue;
    if (a.goal_distance() <= arrival_tolerance(a.radius)) {
      a.status = AgentStatus::arrived;
      a.velocity = Vec::zero(dim);
      state.arrival_times[i] = state.t + state.world.dt;
      effects.agents[i].newly_arrived = true;
    }
  }

  // Stuck counters for agents that were commanded this step.
  for (std::size_t i = 0; i < n; ++i) {
    if (!effects.agents[i].was_active) continue;
    double moved = distance(state.agents[i].position, prev_positions[i]);
    if (moved > kMoveEpsilon)
      state.stuck_counters[i] = 0;
    else
      state.stuck_counters[i] += 1;
  }

  state.t += state.world.dt;
  state.step_count += 1;

  for (std::size_t i = 0; i < n; ++i) {
    effects.agents[i].goal_dist_after = state.agents[i].goal_distance();
    effects.agents[i].min_surface_after = min_surface_vs_all(state, i);
  }

  append_record(state);
  return effects;
}

namespace {

std::vector<ObservableState> sensed(const EpisodeState& state, int agent_index,
                                    bool peers_only) {
  require(agent_index >= 0 &&
              agent_index < static_cast<int>(state.agents.size()),
          ErrorCategory::config, "agent index out of range");
  const AgentState& me = state.agents[static_cast<std::size_t>(agent_index)];
  std::vector<ObservableState> out;
  for (std::size_t j = 0; j < state.agents.size(); ++j) {
    if (static_cast<int>(j) == agent_index) continue;
    const AgentState& other = state.agents[j];
    if (peers_only && other.status == AgentStatus::collided) continue;
    if (distance(me.position, other.position) <= state.world.neighbor_radius)
      out.push_back(observable(other));
  }
  std::sort(out.begin(), out.end(),
            [&](const ObservableState& a, const ObservableState& b) {
              double da = surface_distance(me, a);
              double db = surface_distance(me, b);
              if (da != db) return da < db;
              return a.id < b.id;
            });
  return out;
}

/// Orthonormal frame whose first axis points from the agent to its goal.
/// Falls back to the heading direction when standing on the goal.
struct GoalFrame {
  Vec ex, ey, ez;  // ez unused in 2D
};

GoalFrame goal_frame(const AgentState& a, int dim) {
  Vec ex = (a.goal - a.position).normalized_or_zero(1e-9);
  if (ex.norm_sq() == 0.0) ex = heading_direction(a);
  GoalFrame f;
  f.ex = ex;
  if (dim == 2) {
    f.ey = Vec(-ex.y(), ex.x());
    f.ez = Vec::zero(2);
    return f;
  }
  Vec ref = std::abs(ex.z()) < 0.99 ? Vec(0.0, 0.0, 1.0) : Vec(1.0, 0.0, 0.0);
  f.ey = cross(ref, ex).normalized_or_zero();
  f.ez = cross(f.ex, f.ey);
  return f;
}

}  // namespace

std::vector<ObservableState> sensed_bodies(const EpisodeState& state,
                                           int agent_index) {
  return sensed(state, agent_index, false);
}

std::vector<ObservableState> sensed_peers(const EpisodeState& state,
                                          int agent_index) {
  return sensed(state, agent_index, true);
}

int observation_length(int dimension) {
  require(dimension == 2 || dimension == 3, ErrorCategory::config,
          "dimension must be 2 or 3");
  int d = dimension;
  int ego = 3 + d;                     // goal dist, v_pref, radius, heading
  int per_neighbor = 2 * d + 4;        // rel pos, rel vel, r, r_sum, d, flag
  return ego + kObservedNeighbors * per_neighbor;
}

std::vector<double> observe(const EpisodeState& state, int agent_id) {
  int idx = state.index_of(agent_id);
  const AgentState& me = state.agents[static_cast<std::size_t>(idx)];
  require(me.status == AgentStatus::active, ErrorCategory::config,
          "observe() requires an active agent");
  const int dim = state.world.dimension;

  GoalFrame f = goal_frame(me, dim);
  auto project = [&](const Vec& v) {
    if (dim == 2) return Vec(v.dot(f.ex), v.dot(f.ey));
    return Vec(v.dot(f.ex), v.dot(f.ey), v.dot(f.ez));
  };

  std::vector<double> obs;
  obs.reserve(static_cast<std::size_t>(observation_length(dim)));
  obs.push_back(me.goal_distance());
  obs.push_back(me.preferred_speed);
  obs.push_back(me.radius);
  Vec h = project(heading_direction(me));
  for (int i = 0; i < dim; ++i) obs.push_back(h[i]);

  std::vector<ObservableState> bodies = sensed_bodies(state, idx);
  for (int slot = 0; slot < kObservedNeighbors; ++slot) {
    if (slot < static_cast<int>(bodies.size())) {
      const ObservableState& nb = bodies[static_cast<std::size_t>(slot)];
      Vec rel_p = project(nb.position - me.position);
      Vec rel_v = project(nb.velocity - me.velocity);
      for (int i = 0; i < dim; ++i) obs.push_back(rel_p[i]);
      for (int i = 0; i < dim; ++i) obs.push_back(rel_v[i]);
      obs.push_back(nb.radius);
      obs.push_back(nb.radius + me.radius);
      obs.push_back(surface_distance(me, nb));
      obs.push_back(1.0);
    } else {
      for (int i = 0; i < 2 * dim + 4; ++i) obs.push_back(0.0);
    }
  }
  return obs;
}

TerminationReport episode_terminated(const EpisodeState& state) {
  TerminationReport r;
  bool all_terminal = true;
  for (const auto& a : state.agents)
    if (a.status == AgentStatus::active) all_terminal = false;
  bool timeout = state.step_count >= state.world.max_steps();
  r.done = all_terminal || timeout;
  r.outcomes.reserve(state.agents.size());
  bool any_collision = false;
  bool any_stuck = false;
  for (const auto& a : state.agents) {
    switch (a.status) {
      case AgentStatus::arrived:
        r.outcomes.push_back(AgentOutcome::success);
        break;
      case AgentStatus::collided:
        r.outcomes.push_back(AgentOutcome::collision);
        any_collision = true;
        break;
      case AgentStatus::active:
        r.outcomes.push_back(AgentOutcome::stuck);
        any_stuck = true;
        break;
    }
  }
  r.scenario = any_collision ? ScenarioOutcome::collision
               : any_stuck  ? ScenarioOutcome::stuck
                            : ScenarioOutcome::success;
  return r;
}

std::string trajectory_jsonl(const EpisodeState& state) {
  using detail::json;
  std::string out;
  json header;
  header["format"] = "swarmnav-trajectory/1";
  header["dimension"] = state.world.dimension;
  header["dt"] = state.world.dt;
  json ids = json::array();
  for (const auto& a : state.agents) ids.push_back(a.id);
  header["agents"] = ids;
  out += header.dump() + "\n";
  for (const auto& rec : state.trajectory) {
    json line;
    line["t"] = rec.t;
    json agents = json::array();
    for (const auto& ar : rec.agents) {
      json a;
      a["id"] = ar.id;
      a["position"] = detail::vec_to_json(ar.position);
      a["velocity"] = detail::vec_to_json(ar.velocity);
      json heading = json::array({ar.heading_psi});
      if (state.world.dimension == 3) heading.push_back(ar.heading_phi);
      a["heading"] = heading;
      a["status"] = to_string(ar.status);
      if (std::isfinite(ar.min_surface))
        a["d_min"] = ar.min_surface;
      else
        a["d_min"] = nullptr;
      a["mode"] = to_string(ar.mode);
      agents.push_back(a);
    }
    line["agents"] = agents;
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace swarmnav
