#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "swarmnav/vec.hpp"

namespace swarmnav {

/// Terminal statuses are absorbing: once an agent arrives or collides its
/// kinematic state is frozen for the rest of the episode.
enum class AgentStatus { active, arrived, collided };

inline const char* to_string(AgentStatus s) {
  switch (s) {
    case AgentStatus::active: return "active";
    case AgentStatus::arrived: return "arrived";
    case AgentStatus::collided: return "collided";
  }
  return "unknown";
}

/// Full per-agent state. Heading is stored as spherical angles: psi is the
/// azimuth in the xy plane, phi the polar angle from +z. In 2D phi is held at
/// pi/2 so heading_direction() works uniformly in both dimensions.
struct AgentState {
  int id = 0;
  Vec position;
  Vec velocity;
  Vec goal;
  double radius = 0.3;           // m
  double preferred_speed = 1.0;  // m/s, also the speed cap
  double heading_psi = 0.0;      // rad
  double heading_phi = 1.5707963267948966;  // rad, pi/2 in 2D
  AgentStatus status = AgentStatus::active;

  double goal_distance() const { return distance(position, goal); }
};

/// The slice of a neighbor's state that other agents can sense. The id rides
/// along so deterministic tie-breaking (e.g. for coincident centers) has a
/// stable key; it carries no physical information.
struct ObservableState {
  int id = 0;
  Vec position;
  Vec velocity;
  double radius = 0.0;
};

inline ObservableState observable(const AgentState& a) {
  return ObservableState{a.id, a.position, a.velocity, a.radius};
}

/// Unit heading vector in the agent's dimension.
inline Vec heading_direction(int dim, double psi, double phi) {
  if (dim == 2) return Vec(std::cos(psi), std::sin(psi));
  return Vec(std::sin(phi) * std::cos(psi), std::sin(phi) * std::sin(psi),
             std::cos(phi));
}

inline Vec heading_direction(const AgentState& a) {
  return heading_direction(a.position.dim(), a.heading_psi, a.heading_phi);
}

/// Signed distance between body surfaces; negative means overlap.
inline double surface_distance(const Vec& pa, double ra, const Vec& pb,
                               double rb) {
  return distance(pa, pb) - ra - rb;
}

inline double surface_distance(const AgentState& a, const ObservableState& b) {
  return surface_distance(a.position, a.radius, b.position, b.radius);
}

inline double surface_distance(const AgentState& a, const AgentState& b) {
  return surface_distance(a.position, a.radius, b.position, b.radius);
}

/// Smallest surface distance from `a` to any neighbor; +inf when the set is
/// empty so "no neighbor" compares larger than every activation threshold.
inline double min_surface_distance(const AgentState& a,
                                   std::span<const ObservableState> neighbors) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& n : neighbors) {
    double d = surface_distance(a, n);
    if (d < best) best = d;
  }
  return best;
}

}  // namespace swarmnav
