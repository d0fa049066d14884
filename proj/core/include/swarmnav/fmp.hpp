#pragma once

#include <span>

#include "swarmnav/env.hpp"

namespace swarmnav::fmp {

/// Force-based planner. The control law is
///   u = 0                 if v·u_bar > 0 and ||v|| >= v_max
///   u = f_rep + f_nav     otherwise
/// with f_nav = -c1 (p - p_goal) - c2 v and a short-range repulsion
/// f_rep = sum_j rho (r_act - d_j)^2 n_hat_j over neighbors with surface
/// distance d_j below the activation radius r_act = cbrt(3 v_pref^2 / 2 rho).
/// That radius makes the work done by the repulsion from first contact to
/// touch equal the kinetic energy at v_pref exactly, so a coasting head-on
/// approach stops right at the surface (see the stopping tests). The energy
/// budget has no slack for the attraction term or for discrete-time
/// overshoot; the hard non-overlap guarantee at practical step sizes comes
/// from the adapter's closing-speed cap below.

struct FmpConfig {
  double rho = 7.5e6;  // repulsion gain, m/s^2 per m^2 of penetration
  // Navigational gains. Stiff on purpose: braking starts ~0.2 m out per
  // m/s of speed, which keeps the arrival tail short enough that a straight
  // unobstructed run beats the straight-line time bound at every v_pref in
  // the sampled range. The discrete step map at the benchmark dt of 0.1 s
  // has eigenvalues 0.4 and 0.25, so approaches settle without ringing.
  double c1 = 45.0;  // 1/s^2, goal attraction
  double c2 = 9.0;   // 1/s, damping
  void validate() const;
};

/// r_act = cbrt(3 v_pref^2 / (2 rho)). Positive inputs required.
double activation_radius(double v_pref, double rho);

Vec navigational_force(const AgentState& agent, double c1, double c2);

/// Sum of rho (r_act - d)^2 toward the agent over neighbors with d < r_act.
/// Coincident centers get a deterministic direction hashed from the two ids.
Vec repulsive_force(const AgentState& agent,
                    std::span<const ObservableState> neighbors, double rho);

/// The clamped control law above. v_max is the agent's velocity cap.
Vec control(const AgentState& agent,
            std::span<const ObservableState> neighbors, const FmpConfig& cfg,
            double v_max);

/// Adapter from the acceleration command to the shared Action channel:
/// integrates v' = clamp_norm(v + dt u, v_max), then emits the speed and
/// capped heading changes that realize v' as closely as the channel allows.
/// On top of the raw law the adapter adds deterministic safeguards, all
/// documented alongside their code:
///  - detour steering around bodies that block the goal ray (the raw forces
///    are purely radial and would otherwise park the agent behind any
///    stopped body);
///  - tangential sliding along bodies already in contact range;
///  - a per-neighbor closing-speed cap so one step can never close more
///    than 45% of the surface gap beyond a 1 cm standoff (discrete-time
///    safety: the gap stays positive forever);
///  - a goal-distance speed cap (no overshoot past the goal in one step).
/// `neighbors` should be every sensed body, including collided ones.
/// with_repulsion = false drops the repulsive force term (pursuit by the
/// navigational force alone) while keeping the channel safeguards; the mode
/// switch uses this for agents with no peers in range.
Action plan_action(const AgentState& agent,
                   std::span<const ObservableState> neighbors,
                   const FmpConfig& cfg, double dt, double v_max,
                   bool with_repulsion = true);

}  // namespace swarmnav::fmp
