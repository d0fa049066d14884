#include "swarmnav/fmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "swarmnav/rng.hpp"

namespace swarmnav::fmp {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kHalfPi = 1.5707963267948966;

// One step may close at most this fraction of the surface gap toward any
// body. Two agents closing mutually at the cap still leave 10% of the gap,
// so the gap stays positive through any sequence of steps.
constexpr double kGovernorFraction = 0.45;

// Lateral clearance beyond the combined radius when routing around a body.
constexpr double kDetourClearance = 0.15;  // m

// Within this surface gap the desired direction is projected onto the
// body's tangent plane (slide along the surface instead of pressing in).
// Must stay below the generator's 0.1 m goal clearance or final approaches
// next to a parked agent would be deflected forever.
constexpr double kContactBand = 0.06;  // m

// The governor reserves this much gap; combined with the fraction below the
// reachable gap floor is positive, so surfaces never meet.
constexpr double kGovernorStandoff = 0.01;  // m

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  return r <= -kPi ? kPi : r;
}

double clamp_step(double a) {
  return std::clamp(a, -kMaxHeadingStep, kMaxHeadingStep);
}

// Deterministic unit vector for the coincident-center degeneracy, hashed
// from the ordered id pair so replays agree.
Vec coincident_direction(int dim, int agent_id, int neighbor_id) {
  Rng rng(derive_seed(0x636F696E63ull, static_cast<std::uint64_t>(
                                           static_cast<std::uint32_t>(agent_id)),
                      static_cast<std::uint64_t>(
                          static_cast<std::uint32_t>(neighbor_id))));
  double ang = rng.uniform(0.0, 2.0 * kPi);
  if (dim == 2) return Vec(std::cos(ang), std::sin(ang));
  double z = rng.uniform(-1.0, 1.0);
  double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec(r * std::cos(ang), r * std::sin(ang), z);
}

// Right-hand perpendicular to `dir` for dead-center blockages: both parties
// of a symmetric head-on each turn to their own right and pass on opposite
// world sides.
Vec right_perpendicular(const Vec& dir) {
  if (dir.dim() == 2) return Vec(dir.y(), -dir.x());
  Vec horiz = cross(dir, Vec(0.0, 0.0, 1.0));
  double n = horiz.norm();
  if (n > 1e-9) return horiz * (1.0 / n);
  return Vec(1.0, 0.0, 0.0);  // vertical ray: any horizontal side works
}

// True when some body's disc blocks the straight segment to the goal. The
// raw force field is purely radial, so without a detour an agent parks for
// good behind any stopped body that sits on its path.
bool goal_ray_blocked(const AgentState& a,
                      std::span<const ObservableState> neighbors,
                      double goal_dist, const Vec& eg) {
  for (const auto& nb : neighbors) {
    Vec rel = nb.position - a.position;
    double s = rel.dot(eg);
    if (s <= 0.0 || s >= goal_dist) continue;
    if ((rel - s * eg).norm() < a.radius + nb.radius + kDetourClearance)
      return true;
  }
  return false;
}

// Turn-cost weight when scoring detour bearings. Without it the left and
// right candidates around a blocking cluster tie near-symmetrically and the
// winner flips every step, leaving the agent spinning in place; weighting
// by distance from the current heading commits it to one way around.
constexpr double kDetourInertia = 0.7;

// 2D detour: every relevant body subtends a blocked bearing interval
// (half-width asin(clearance/distance)); adjacent bodies merge into one
// blocked arc, so impassable corridors between two parked agents are seen
// as a single obstacle. Steer for the free bearing nearest the goal
// bearing (with the turn-cost bias above), ties to the right so symmetric
// opponents pass on opposite sides.
Vec detour_2d(const AgentState& a, std::span<const ObservableState> neighbors,
              double goal_dist, const Vec& eg, Vec dir) {
  struct Arc {
    double center;
    double half;
  };
  std::vector<Arc> arcs;
  for (const auto& nb : neighbors) {
    Vec rel = nb.position - a.position;
    double d = rel.norm();
    double clear = a.radius + nb.radius + kDetourClearance;
    if (d - clear >= goal_dist) continue;  // goal is reached first
    if (d <= 1e-12) continue;
    double half = d <= clear ? kHalfPi : std::asin(clear / d);
    arcs.push_back(Arc{std::atan2(rel.y(), rel.x()), half});
  }
  if (arcs.empty()) return dir;

  double theta_goal = std::atan2(eg.y(), eg.x());
  auto blocked = [&arcs](double theta) {
    for (const Arc& c : arcs)
      if (std::abs(wrap_angle(theta - c.center)) < c.half) return true;
    return false;
  };

  double best = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  double best_off = 0.0;
  for (const Arc& c : arcs) {
    for (double edge : {c.center - c.half - 1e-6, c.center + c.half + 1e-6}) {
      if (blocked(edge)) continue;
      double off = wrap_angle(edge - theta_goal);
      double score = std::abs(off) +
                     kDetourInertia *
                         std::abs(wrap_angle(edge - a.heading_psi));
      // Lower score wins; exact ties prefer the clockwise side.
      if (score < best_score - 1e-12 ||
          (std::abs(score - best_score) <= 1e-12 && off < best_off)) {
        best_score = score;
        best_off = off;
        best = edge;
      }
    }
  }
  if (!std::isfinite(best_score)) return dir;  // fully surrounded
  return Vec(std::cos(best), std::sin(best));
}

// 3D detour: aim past the tangent point of the first body blocking the
// goal ray (ties by id). The extra dimension leaves room to swerve, so the
// cluster analysis the 2D path needs is unnecessary here.
Vec detour_3d(const AgentState& a, std::span<const ObservableState> neighbors,
              double goal_dist, const Vec& eg, Vec dir) {
  const ObservableState* hit = nullptr;
  double hit_s = 0.0;
  for (const auto& nb : neighbors) {
    Vec rel = nb.position - a.position;
    double s = rel.dot(eg);
    if (s <= 0.0 || s >= goal_dist) continue;
    double clear = a.radius + nb.radius + kDetourClearance;
    if ((rel - s * eg).norm() >= clear) continue;
    if (hit == nullptr || s < hit_s - 1e-12 ||
        (std::abs(s - hit_s) <= 1e-12 && nb.id < hit->id)) {
      hit = &nb;
      hit_s = s;
    }
  }
  if (hit == nullptr) return dir;

  Vec rel = hit->position - a.position;
  Vec lat = rel - hit_s * eg;  // from the ray toward the body center
  double lat_n = lat.norm();
  double clear = a.radius + hit->radius + kDetourClearance;
  Vec side = lat_n > 1e-9 ? lat * (-1.0 / lat_n) : right_perpendicular(eg);
  Vec aim = hit->position + clear * side;
  Vec out = (aim - a.position).normalized_or_zero();
  return out.norm_sq() > 0.0 ? out : dir;
}

Vec detour_direction(const AgentState& a,
                     std::span<const ObservableState> neighbors, Vec dir) {
  double goal_dist = a.goal_distance();
  if (goal_dist < 1e-9 || neighbors.empty()) return dir;
  Vec eg = (a.goal - a.position) * (1.0 / goal_dist);
  // Reaching anywhere in the arrival ball counts, so bodies parked just
  // beyond it (goal spacing guarantees only 0.1 m there, less than the
  // detour clearance) must not read as blockers.
  double target = goal_dist - arrival_tolerance(a.radius);
  if (target <= 0.0) return dir;
  if (!goal_ray_blocked(a, neighbors, target, eg)) return dir;
  return a.position.dim() == 2 ? detour_2d(a, neighbors, target, eg, dir)
                               : detour_3d(a, neighbors, target, eg, dir);
}

// Near-contact sliding: inside kContactBand the desired direction loses its
// component into each touching body, ordered nearest first. Pressing into a
// contact would be throttled to a crawl by the governor; sliding keeps the
// agent moving and dissolves multi-body wedges. If the contacts box the
// direction in completely, fall back to the nearest body's tangent that
// best advances the goal.
Vec slide_direction(const AgentState& a,
                    std::span<const ObservableState> neighbors, Vec dir) {
  struct Contact {
    double gap;
    int id;
    Vec toward;  // unit, agent center -> body center
  };
  std::vector<Contact> contacts;
  for (const auto& nb : neighbors) {
    double gap = surface_distance(a, nb);
    if (gap >= kContactBand) continue;
    Vec off = nb.position - a.position;
    double n = off.norm();
    if (n <= 1e-12) continue;  // coincident centers: repulsion handles it
    contacts.push_back(Contact{gap, nb.id, off * (1.0 / n)});
  }
  if (contacts.empty()) return dir;
  std::sort(contacts.begin(), contacts.end(), [](const Contact& x,
                                                 const Contact& y) {
    return x.gap != y.gap ? x.gap < y.gap : x.id < y.id;
  });

  Vec out = dir;
  for (int pass = 0; pass < 2; ++pass)
    for (const Contact& c : contacts) {
      double closing = out.dot(c.toward);
      if (closing > 0.0) out -= closing * c.toward;
    }
  double n = out.norm();
  if (n > 1e-9) return out * (1.0 / n);

  // Boxed in: both tangents of the nearest contact, pick by goal progress,
  // ties to the right so symmetric opponents resolve to opposite sides.
  Vec e = contacts.front().toward;
  Vec t = right_perpendicular(e);
  if (a.position.dim() == 3) {
    Vec alt = dir - dir.dot(e) * e;
    double an = alt.norm();
    if (an > 1e-9) t = alt * (1.0 / an);
  }
  Vec eg = (a.goal - a.position).normalized_or_zero();
  return t.dot(eg) >= 0.0 ? t : -1.0 * t;
}

}  // namespace

void FmpConfig::validate() const {
  require(std::isfinite(rho) && rho > 0.0, ErrorCategory::config,
          "fmp rho must be positive");
  require(std::isfinite(c1) && c1 > 0.0, ErrorCategory::config,
          "fmp c1 must be positive");
  require(std::isfinite(c2) && c2 > 0.0, ErrorCategory::config,
          "fmp c2 must be positive");
}

double activation_radius(double v_pref, double rho) {
  require(std::isfinite(v_pref) && v_pref > 0.0, ErrorCategory::config,
          "activation radius needs v_pref > 0");
  require(std::isfinite(rho) && rho > 0.0, ErrorCategory::config,
          "activation radius needs rho > 0");
  return std::cbrt(3.0 * v_pref * v_pref / (2.0 * rho));
}

Vec navigational_force(const AgentState& agent, double c1, double c2) {
  return -c1 * (agent.position - agent.goal) - c2 * agent.velocity;
}

Vec repulsive_force(const AgentState& agent,
                    std::span<const ObservableState> neighbors, double rho) {
  const int dim = agent.position.dim();
  double r_act = activation_radius(agent.preferred_speed, rho);
  Vec sum = Vec::zero(dim);
  for (const auto& nb : neighbors) {
    double d = surface_distance(agent, nb);
    if (d >= r_act) continue;
    Vec offset = agent.position - nb.position;
    double center_dist = offset.norm();
    Vec n_hat = center_dist > 1e-12
                    ? offset * (1.0 / center_dist)
                    : coincident_direction(dim, agent.id, nb.id);
    double mag = (r_act - d) * (r_act - d);
    sum += (rho * mag) * n_hat;
  }
  return sum;
}

Vec control(const AgentState& agent,
            std::span<const ObservableState> neighbors, const FmpConfig& cfg,
            double v_max) {
  cfg.validate();
  Vec u_bar = repulsive_force(agent, neighbors, cfg.rho) +
              navigational_force(agent, cfg.c1, cfg.c2);
  if (agent.velocity.dot(u_bar) > 0.0 && agent.velocity.norm() >= v_max)
    return Vec::zero(agent.position.dim());
  return u_bar;
}

Action plan_action(const AgentState& agent,
                   std::span<const ObservableState> neighbors,
                   const FmpConfig& cfg, double dt, double v_max,
                   bool with_repulsion) {
  require(std::isfinite(dt) && dt > 0.0, ErrorCategory::config,
          "fmp action needs dt > 0");
  const int dim = agent.position.dim();

  Vec u = control(agent, with_repulsion ? neighbors : std::span<const ObservableState>{},
                  cfg, v_max);
  Vec v_new = (agent.velocity + dt * u).clamped_norm(v_max);
  double speed = std::min(v_new.norm(), agent.preferred_speed);
  Vec dir = v_new.normalized_or_zero();
  if (dir.norm_sq() == 0.0) return Action{};  // no momentum, no net force

  dir = detour_direction(agent, neighbors, dir);
  dir = slide_direction(agent, neighbors, dir);

  double dpsi = 0.0;
  if (dir.x() != 0.0 || dir.y() != 0.0) {
    double psi_des = std::atan2(dir.y(), dir.x());
    dpsi = clamp_step(wrap_angle(psi_des - agent.heading_psi));
  }
  double dphi = 0.0;
  double new_phi = kHalfPi;
  if (dim == 3) {
    double phi_des = std::acos(std::clamp(dir.z(), -1.0, 1.0));
    dphi = clamp_step(phi_des - agent.heading_phi);
    new_phi = std::clamp(agent.heading_phi + dphi, 0.0, kPi);
  }
  Vec exec_dir =
      heading_direction(dim, wrap_angle(agent.heading_psi + dpsi), new_phi);

  // The heading cap means the executed direction can lag the desired one;
  // scale speed by the alignment so the agent pivots before it pushes.
  speed *= std::max(0.0, exec_dir.dot(dir));

  // No overshooting the goal in a single step.
  speed = std::min(speed, agent.goal_distance() / dt);

  // Closing-speed governor: along the executed direction, one step never
  // closes more than kGovernorFraction of the gap beyond the standoff, so
  // the gap to any body stays above kGovernorStandoff forever.
  for (const auto& nb : neighbors) {
    Vec off = nb.position - agent.position;
    double center_dist = off.norm();
    if (center_dist <= 1e-12) continue;
    double closing = exec_dir.dot(off) / center_dist;
    if (closing <= 1e-12) continue;
    double gap = surface_distance(agent, nb);
    double allowed = kGovernorFraction *
                     std::max(0.0, gap - kGovernorStandoff) / (dt * closing);
    speed = std::min(speed, allowed);
  }

  speed = std::clamp(speed, 0.0, agent.preferred_speed);
  return Action{speed, dpsi, dphi};
}

}  // namespace swarmnav::fmp
