#include "swarmnav/reward.hpp"

#include <cmath>

namespace swarmnav::reward {

const char* to_string(Variant v) {
  return v == Variant::legacy ? "legacy" : "nsl";
}

Variant variant_from_string(const std::string& s) {
  if (s == "legacy") return Variant::legacy;
  if (s == "nsl") return Variant::nsl;
  fail(ErrorCategory::config, "unknown reward variant \"" + s + "\"");
}

RewardConfig RewardConfig::legacy_defaults() {
  RewardConfig c;
  c.variant = Variant::legacy;
  c.collision_penalty = -0.25;
  return c;
}

RewardConfig RewardConfig::nsl_defaults() { return RewardConfig{}; }

void RewardConfig::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorCategory::config,
          "reward alpha must be positive");
  require(std::isfinite(arrival_reward), ErrorCategory::config,
          "arrival reward must be finite");
  require(std::isfinite(collision_penalty) && collision_penalty < 0.0,
          ErrorCategory::config, "collision penalty must be negative");
}

double legacy_reward(bool reached_goal, double dmin) {
  if (reached_goal) return 1.0;
  if (dmin < 0.0) return -0.25;
  if (dmin > 0.0 && dmin < 0.2) return -0.1 + 0.05 * dmin;
  return 0.0;
}

double nsl_collision_term(double dmin) {
  if (dmin < 0.0) return -1.0;
  if (dmin > 0.0 && dmin < 0.1) return 10.0 * dmin - 1.0;
  return 0.0;
}

double nsl_goal_term(bool reached_goal, double goal_dist_prev,
                     double goal_dist_now, double alpha) {
  require(std::isfinite(goal_dist_prev) && goal_dist_prev >= 0.0 &&
              std::isfinite(goal_dist_now) && goal_dist_now >= 0.0,
          ErrorCategory::config, "goal distances must be finite and >= 0");
  if (reached_goal) return 1.0;
  return alpha * (goal_dist_prev - goal_dist_now);
}

double nsl_reward(bool reached_goal, double goal_dist_prev,
                  double goal_dist_now, double dmin, double alpha) {
  return nsl_collision_term(dmin) +
         nsl_goal_term(reached_goal, goal_dist_prev, goal_dist_now, alpha);
}

namespace {

// Same shapes as the fixed-constant forms, with the levels taken from the
// config. Band widths (0.2 / 0.1) and the legacy band line stay fixed; the
// nsl band interpolates linearly from the penalty at 0 to 0 at 0.1 so the
// default penalty -1 reproduces 10*d - 1.
double legacy_general(bool reached, double dmin, double arrival,
                      double penalty) {
  if (reached) return arrival;
  if (dmin < 0.0) return penalty;
  if (dmin > 0.0 && dmin < 0.2) return -0.1 + 0.05 * dmin;
  return 0.0;
}

double nsl_collision_general(double dmin, double penalty) {
  if (dmin < 0.0) return penalty;
  if (dmin > 0.0 && dmin < 0.1) return penalty * (1.0 - dmin / 0.1);
  return 0.0;
}

}  // namespace

double step_reward(const RewardConfig& cfg, bool reached_goal,
                   double goal_dist_prev, double goal_dist_now, double dmin) {
  if (cfg.variant == Variant::legacy)
    return legacy_general(reached_goal, dmin, cfg.arrival_reward,
                          cfg.collision_penalty);
  double goal = reached_goal ? cfg.arrival_reward
                             : nsl_goal_term(false, goal_dist_prev,
                                             goal_dist_now, cfg.alpha);
  return nsl_collision_general(dmin, cfg.collision_penalty) + goal;
}

}  // namespace swarmnav::reward
