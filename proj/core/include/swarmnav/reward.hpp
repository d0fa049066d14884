#pragma once

#include <string>

#include "swarmnav/error.hpp"

namespace swarmnav::reward {

/// Per-step rewards for the two training variants.
///
/// legacy: sparse arrival reward with a thin discomfort band,
///   1 at goal; -0.25 on overlap; -0.1 + 0.05*d_min inside (0, 0.2); else 0.
/// nsl: collision term R_c plus goal term R_g,
///   R_c = -1 on overlap; 10*d_min - 1 inside (0, 0.1); else 0.
///   R_g = 1 at goal; else alpha*(goal_dist_prev - goal_dist_now).
///
/// d_min is the surface distance to the nearest other agent; exactly 0 falls
/// in neither open band, so both collision terms return 0 there while the
/// collision predicate itself (d_min < 0) is unaffected. At-goal and overlap
/// in the same step never co-occur here because the environment marks the
/// agent collided first (collision precedence).

enum class Variant { legacy, nsl };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct RewardConfig {
  Variant variant = Variant::nsl;
  double alpha = 0.08;             // reward per meter of goal progress (nsl)
  double arrival_reward = 1.0;
  double collision_penalty = -1.0;  // legacy default is -0.25

  static RewardConfig legacy_defaults();
  static RewardConfig nsl_defaults();
  void validate() const;
};

double legacy_reward(bool reached_goal, double dmin);

double nsl_collision_term(double dmin);

/// Distances must be >= 0 and finite.
double nsl_goal_term(bool reached_goal, double goal_dist_prev,
                     double goal_dist_now, double alpha);

double nsl_reward(bool reached_goal, double goal_dist_prev,
                  double goal_dist_now, double dmin, double alpha);

/// Variant dispatch with configurable arrival/collision levels. With the
/// default levels this is exactly legacy_reward / nsl_reward.
double step_reward(const RewardConfig& cfg, bool reached_goal,
                   double goal_dist_prev, double goal_dist_now, double dmin);

}  // namespace swarmnav::reward
