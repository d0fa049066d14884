#include <cmath>

#include "doctest.h"
#include "swarmnav/env.hpp"

using namespace swarmnav;

namespace {

Scenario lone(double x, double y, double gx, double gy, double psi = 0.0) {
  Scenario s;
  s.label = "lone";
  s.world = WorldConfig::default_2d();
  AgentState a;
  a.id = 0;
  a.position = Vec(x, y);
  a.goal = Vec(gx, gy);
  a.heading_psi = psi;
  s.agents = {a};
  return s;
}

AgentCommand cmd(int id, double speed, double dpsi, double dphi = 0.0) {
  AgentCommand c;
  c.agent_id = id;
  c.action = Action{speed, dpsi, dphi};
  return c;
}

}  // namespace

TEST_CASE("step integrates turn-then-move kinematics") {
  Scenario s = lone(1.0, 4.0, 7.0, 4.0);
  EpisodeState st = EpisodeState::start(s);
  double dpsi = 0.2;
  step(st, std::vector<AgentCommand>{cmd(0, 1.0, dpsi)});

  // independent hand integration: turn first, then move along new heading
  double psi = 0.0 + dpsi;
  Vec v(std::cos(psi), std::sin(psi));
  CHECK(st.agents[0].heading_psi == doctest::Approx(psi).epsilon(1e-15));
  CHECK(st.agents[0].velocity.x() == doctest::Approx(v.x()).epsilon(1e-15));
  CHECK(st.agents[0].velocity.y() == doctest::Approx(v.y()).epsilon(1e-15));
  CHECK(st.agents[0].position.x() ==
        doctest::Approx(1.0 + 0.1 * v.x()).epsilon(1e-15));
  CHECK(st.agents[0].position.y() ==
        doctest::Approx(4.0 + 0.1 * v.y()).epsilon(1e-15));
  CHECK(st.t == doctest::Approx(0.1));
  CHECK(st.step_count == 1);
  REQUIRE(st.trajectory.size() == 2);  // t=0 snapshot plus one step
}

TEST_CASE("step rejects out-of-range actions instead of clamping") {
  Scenario s = lone(1.0, 4.0, 7.0, 4.0);
  EpisodeState st = EpisodeState::start(s);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.5, 0.0)}), Error);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, -0.5, 0.0)}), Error);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.6)}), Error);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0, 0.1)}),
                  Error);  // dphi must be 0 in 2D
  // state is untouched after a rejected batch
  CHECK(st.step_count == 0);
  CHECK(st.agents[0].position == Vec(1.0, 4.0));
}

TEST_CASE("step demands exactly one command per active agent") {
  Scenario s = lone(1.0, 4.0, 7.0, 4.0);
  s.agents.push_back(s.agents[0]);
  s.agents[1].id = 1;
  s.agents[1].position = Vec(1.0, 6.0);
  s.agents[1].goal = Vec(7.0, 6.0);
  EpisodeState st = EpisodeState::start(s);

  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0)}), Error);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0),
                                                     cmd(0, 1.0, 0.0)}),
                  Error);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0),
                                                     cmd(7, 1.0, 0.0)}),
                  Error);
  CHECK_NOTHROW(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0),
                                                   cmd(1, 1.0, 0.0)}));
}

TEST_CASE("colliding pair is marked symmetrically in the same step") {
  Scenario s;
  s.world = WorldConfig::default_2d();
  AgentState a;
  a.id = 0;
  a.position = Vec(3.0, 4.0);
  a.goal = Vec(7.0, 4.0);
  a.heading_psi = 0.0;
  AgentState b = a;
  b.id = 1;
  b.position = Vec(3.65, 4.0);  // surface gap 0.05
  b.goal = Vec(1.0, 4.0);
  b.heading_psi = 3.141592653589793;
  s.agents = {a, b};
  EpisodeState st = EpisodeState::start(s);

  auto fx = step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0), cmd(1, 1.0, 0.0)});
  CHECK(st.agents[0].status == AgentStatus::collided);
  CHECK(st.agents[1].status == AgentStatus::collided);
  CHECK(fx.agents[0].newly_collided);
  CHECK(fx.agents[1].newly_collided);
  CHECK(fx.agents[0].min_surface_after < 0.0);
  CHECK(st.agents[0].velocity == Vec::zero(2));

  // terminal agents are frozen: no further commands accepted or needed
  auto fx2 = step(st, std::vector<AgentCommand>{});
  CHECK(st.agents[0].position == st.trajectory[1].agents[0].position);
  CHECK_FALSE(fx2.agents[0].was_active);
  CHECK_THROWS_AS(step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0)}), Error);

  auto report = episode_terminated(st);
  CHECK(report.done);
  CHECK(report.scenario == ScenarioOutcome::collision);
}

TEST_CASE("collision wins over arrival in the same step") {
  Scenario s;
  s.world = WorldConfig::default_2d();
  AgentState a;
  a.id = 0;
  a.position = Vec(4.0, 4.0);
  a.goal = Vec(4.2, 4.0);  // 0.2 away: active at t=0, arrived after one step
  a.heading_psi = 0.0;
  AgentState blocker;
  blocker.id = 1;
  blocker.position = Vec(4.75, 4.0);  // head-on, center gap closes to 0.55
  blocker.goal = Vec(4.75, 7.0);
  blocker.heading_psi = 3.141592653589793;
  s.agents = {a, blocker};
  EpisodeState st = EpisodeState::start(s);

  step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0), cmd(1, 1.0, 0.0)});
  // agent 0 ended 0.1 from its goal (within tolerance 0.15) but overlapping
  CHECK(st.agents[0].goal_distance() <= arrival_tolerance(0.3));
  CHECK(st.agents[0].status == AgentStatus::collided);
}

TEST_CASE("arrival tolerance scales with radius and freezes the agent") {
  CHECK(arrival_tolerance(0.1) == 0.1);
  CHECK(arrival_tolerance(0.3) == 0.15);
  CHECK(arrival_tolerance(0.8) == 0.4);

  Scenario s = lone(1.0, 4.0, 1.24, 4.0);
  EpisodeState st = EpisodeState::start(s);
  auto fx = step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0)});
  // moved 0.1, goal distance 0.14 <= 0.15
  CHECK(st.agents[0].status == AgentStatus::arrived);
  CHECK(fx.agents[0].newly_arrived);
  CHECK(st.arrival_times[0] == doctest::Approx(0.1));
  CHECK(st.agents[0].velocity == Vec::zero(2));
  CHECK(episode_terminated(st).scenario == ScenarioOutcome::success);
}

TEST_CASE("stuck counter counts consecutive sub-epsilon moves") {
  Scenario s = lone(4.0, 4.0, 7.0, 4.0);
  EpisodeState st = EpisodeState::start(s);
  // displacement per step 0.1*speed; kMoveEpsilon is 0.02
  step(st, std::vector<AgentCommand>{cmd(0, 0.1, 0.0)});
  CHECK(st.stuck_counters[0] == 1);
  step(st, std::vector<AgentCommand>{cmd(0, 0.19, 0.0)});
  CHECK(st.stuck_counters[0] == 2);
  step(st, std::vector<AgentCommand>{cmd(0, 0.3, 0.0)});  // 0.03 > eps
  CHECK(st.stuck_counters[0] == 0);
  step(st, std::vector<AgentCommand>{cmd(0, 0.0, 0.5)});
  CHECK(st.stuck_counters[0] == 1);
}

TEST_CASE("sensing is range limited, sorted by surface gap, ties by id") {
  Scenario s;
  s.world = WorldConfig::default_2d();
  auto mk = [](int id, double x, double y, double r) {
    AgentState a;
    a.id = id;
    a.position = Vec(x, y);
    a.goal = Vec(x, 7.5);
    a.radius = r;
    return a;
  };
  s.agents = {mk(0, 4.0, 4.0, 0.3),
              mk(1, 5.0, 4.0, 0.2),   // gap 0.5
              mk(2, 4.0, 2.0, 0.25),  // gap 1.45
              mk(3, 4.0, 6.0, 0.45),  // gap 1.25
              mk(4, 0.4, 0.4, 0.3)};  // beyond neighbor_radius 4
  EpisodeState st = EpisodeState::start(s);

  auto bodies = sensed_bodies(st, 0);
  REQUIRE(bodies.size() == 3);
  CHECK(bodies[0].id == 1);
  CHECK(bodies[1].id == 3);
  CHECK(bodies[2].id == 2);

  // equal-distance neighbors fall back to id order
  Scenario tie;
  tie.world = WorldConfig::default_2d();
  tie.agents = {mk(0, 4.0, 4.0, 0.3), mk(2, 5.0, 4.0, 0.2),
                mk(1, 3.0, 4.0, 0.2)};
  EpisodeState st2 = EpisodeState::start(tie);
  auto b2 = sensed_bodies(st2, 0);
  REQUIRE(b2.size() == 2);
  CHECK(b2[0].id == 1);
  CHECK(b2[1].id == 2);
}

TEST_CASE("collided bodies stay sensable but are not peers") {
  Scenario s;
  s.world = WorldConfig::default_2d();
  auto mk = [](int id, double x, double y) {
    AgentState a;
    a.id = id;
    a.position = Vec(x, y);
    a.goal = Vec(x, 7.0);
    return a;
  };
  s.agents = {mk(0, 2.0, 4.0), mk(1, 4.0, 4.0), mk(2, 4.65, 4.0)};
  EpisodeState st = EpisodeState::start(s);
  // drive 1 and 2 into each other; 0 idles in place
  step(st, std::vector<AgentCommand>{cmd(0, 0.0, 0.0), cmd(1, 1.0, 0.0),
                                     cmd(2, 0.0, 0.0)});
  REQUIRE(st.agents[1].status == AgentStatus::collided);
  REQUIRE(st.agents[2].status == AgentStatus::collided);

  CHECK(sensed_bodies(st, 0).size() == 2);
  CHECK(sensed_peers(st, 0).empty());
}

TEST_CASE("observation layout matches the documented block structure") {
  CHECK(observation_length(2) == 37);
  CHECK(observation_length(3) == 46);
  CHECK_THROWS_AS((void)observation_length(4), Error);

  Scenario s;
  s.world = WorldConfig::default_2d();
  AgentState me;
  me.id = 0;
  me.position = Vec(2.0, 4.0);
  me.goal = Vec(6.0, 4.0);  // goal frame = world frame (ex = +x)
  me.radius = 0.3;
  me.preferred_speed = 1.5;
  me.heading_psi = 0.5;
  AgentState nb;
  nb.id = 1;
  nb.position = Vec(3.0, 5.0);
  nb.goal = Vec(3.0, 1.0);
  nb.radius = 0.2;
  nb.heading_psi = -1.5707963267948966;
  s.agents = {me, nb};
  EpisodeState st = EpisodeState::start(s);

  auto obs = observe(st, 0);
  REQUIRE(obs.size() == 37);
  CHECK(obs[0] == doctest::Approx(4.0).epsilon(1e-15));   // goal distance
  CHECK(obs[1] == 1.5);                                   // v_pref
  CHECK(obs[2] == 0.3);                                   // radius
  CHECK(obs[3] == doctest::Approx(std::cos(0.5)).epsilon(1e-15));
  CHECK(obs[4] == doctest::Approx(std::sin(0.5)).epsilon(1e-15));
  // first neighbor block: rel pos, rel vel (both still), radii, gap, flag
  CHECK(obs[5] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(obs[6] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(obs[7] == 0.0);
  CHECK(obs[8] == 0.0);
  CHECK(obs[9] == 0.2);
  CHECK(obs[10] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(obs[11] ==
        doctest::Approx(std::sqrt(2.0) - 0.5).epsilon(1e-15));
  CHECK(obs[12] == 1.0);
  // remaining three slots are zero padded
  for (std::size_t i = 13; i < obs.size(); ++i) CHECK(obs[i] == 0.0);

  // the frame rotates with the goal direction: looking along +y instead
  Scenario r = s;
  r.agents[0].goal = Vec(2.0, 7.5);
  EpisodeState st2 = EpisodeState::start(r);
  auto obs2 = observe(st2, 0);
  // ex = +y, ey = -x, neighbor at rel (1, 1) world = (1, -1) in frame
  CHECK(obs2[5] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(obs2[6] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("3D observation uses the spherical heading and 46 slots") {
  Scenario s;
  s.world = WorldConfig::default_3d();
  AgentState me;
  me.id = 0;
  me.position = Vec(2.0, 4.0, 2.0);
  me.velocity = Vec::zero(3);
  me.goal = Vec(6.0, 4.0, 2.0);
  me.heading_psi = 0.0;
  me.heading_phi = 1.0;
  s.agents = {me};
  EpisodeState st = EpisodeState::start(s);
  auto obs = observe(st, 0);
  REQUIRE(obs.size() == 46);
  CHECK(obs[0] == doctest::Approx(4.0).epsilon(1e-15));
  // heading (sin phi cos psi, sin phi sin psi, cos phi) projected on a
  // goal frame whose ex is +x
  CHECK(obs[3] == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
  for (std::size_t i = 6; i < obs.size(); ++i) CHECK(obs[i] == 0.0);
}

TEST_CASE("trajectory jsonl has a header and one line per record") {
  Scenario s = lone(1.0, 4.0, 7.0, 4.0);
  EpisodeState st = EpisodeState::start(s);
  step(st, std::vector<AgentCommand>{cmd(0, 1.0, 0.0)});
  std::string text = trajectory_jsonl(st);
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 3);  // header + t=0 + one step
  CHECK(text.find("swarmnav-trajectory/1") != std::string::npos);

  // recording can be disabled; only the live state is kept
  EpisodeState quiet = EpisodeState::start(s, false);
  step(quiet, std::vector<AgentCommand>{cmd(0, 1.0, 0.0)});
  CHECK(quiet.trajectory.empty());
}
