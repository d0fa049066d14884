#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "swarmnav/bench.hpp"

using namespace swarmnav;
using namespace swarmnav::bench;

TEST_CASE("generated scenarios are valid, bounded and well separated") {
  WorldConfig w = WorldConfig::default_2d();
  auto set = generate_scenarios(2500, 4, w, 42);
  REQUIRE(set.size() == 2500);

  double radius_sum = 0.0;
  int n_agents = 0;
  for (const auto& s : set) {
    CHECK_NOTHROW(s.validate());
    REQUIRE(s.agents.size() == 4);
    for (const auto& a : s.agents) {
      CHECK(a.radius >= 0.2);
      CHECK(a.radius <= 0.8);
      CHECK(a.preferred_speed >= 0.5);
      CHECK(a.preferred_speed <= 2.0);
      radius_sum += a.radius;
      ++n_agents;
    }
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      for (std::size_t j = i + 1; j < s.agents.size(); ++j) {
        const auto& a = s.agents[i];
        const auto& b = s.agents[j];
        CHECK(surface_distance(a, b) >= 0.1 - 1e-12);
        CHECK(distance(a.goal, b.goal) >= a.radius + b.radius + 0.1 - 1e-12);
      }
    }
  }
  // radii are uniform on [0.2, 0.8]: the mean over 10000 draws is 0.5 to
  // well under +-0.01 (5.8 sigma)
  CHECK(radius_sum / n_agents == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("scenario suites are seed-deterministic with stable prefixes") {
  WorldConfig w = WorldConfig::default_2d();
  auto a = generate_scenarios(10, 4, w, 7);
  auto b = generate_scenarios(10, 4, w, 7);
  CHECK(scenarios_to_json(a) == scenarios_to_json(b));

  auto longer = generate_scenarios(25, 4, w, 7);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(scenario_to_json(a[i]) == scenario_to_json(longer[i]));

  auto other = generate_scenarios(10, 4, w, 8);
  CHECK(scenarios_to_json(a) != scenarios_to_json(other));
}

TEST_CASE("impossible densities fail with a capacity error") {
  WorldConfig w = WorldConfig::default_2d();
  try {
    (void)generate_scenarios(1, 500, w, 1);
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::capacity);
    CHECK(std::string(e.what()).find("500") != std::string::npos);
  }
}

TEST_CASE("extra time compares against the straight-line bound") {
  AgentState a;
  a.position = Vec(1.0, 4.0);
  a.goal = Vec(6.0, 4.0);
  a.preferred_speed = 2.0;
  CHECK(extra_time(a, 3.0, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(extra_time(a, 2.5, 0.1) == doctest::Approx(0.0).scale(1.0));
  // discrete arrivals can beat the bound by less than one step
  CHECK(extra_time(a, 2.0, 0.1) == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("straight planner drives a lone agent home") {
  Scenario s;
  s.label = "lone";
  s.world = WorldConfig::default_2d();
  AgentState a;
  a.id = 0;
  a.position = Vec(1.0, 4.0);
  a.goal = Vec(6.0, 4.0);
  a.heading_psi = 0.0;
  s.agents = {a};

  auto planner = make_straight_planner();
  EvalOptions opt;
  std::vector<Scenario> suite = {s};
  EvalResult res = evaluate(*planner, suite, s.world, opt);
  REQUIRE(res.outcomes.size() == 1);
  CHECK(res.outcomes[0].outcome == ScenarioOutcome::success);
  REQUIRE(res.outcomes[0].agents.size() == 1);
  const AgentResult& ar = res.outcomes[0].agents[0];
  CHECK(ar.outcome == AgentOutcome::success);
  // 5 m to cover, tolerance 0.15, at 1 m/s and dt 0.1: arrives at t = 4.9
  CHECK(ar.t_goal == doctest::Approx(4.9).epsilon(1e-12));
  CHECK(ar.extra_time == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(res.metrics.pct_success == 100.0);
  CHECK(res.metrics.n_cases == 1);
}

TEST_CASE("outcome percentages always partition one hundred") {
  WorldConfig w = WorldConfig::default_2d();
  auto suite = generate_scenarios(30, 6, w, 11);
  fmp::FmpConfig fc;
  auto planner = make_fmp_planner(fc);
  EvalOptions opt;
  opt.workers = 4;
  EvalResult res = evaluate(*planner, suite, w, opt);
  CHECK(res.metrics.pct_success + res.metrics.pct_collision +
            res.metrics.pct_stuck ==
        doctest::Approx(100.0).epsilon(1e-9));
  CHECK(res.metrics.n_cases == 30);
  CHECK(res.metrics.planner == "fmp");
  CHECK(res.metrics.world_size == "8x8");
  CHECK(res.metrics.agent_count == 6);
}

TEST_CASE("evaluation output is independent of the worker count") {
  WorldConfig w = WorldConfig::default_2d();
  auto suite = generate_scenarios(12, 4, w, 90);
  fmp::FmpConfig fc;
  auto planner = make_fmp_planner(fc);

  EvalOptions serial;
  serial.workers = 1;
  EvalOptions parallel;
  parallel.workers = 8;
  EvalResult a = evaluate(*planner, suite, w, serial);
  EvalResult b = evaluate(*planner, suite, w, parallel);
  CHECK(outcomes_jsonl(a.outcomes) == outcomes_jsonl(b.outcomes));
  CHECK(metrics_csv(std::vector<MetricsRow>{a.metrics}) ==
        metrics_csv(std::vector<MetricsRow>{b.metrics}));
}

TEST_CASE("metrics csv has the documented header and one line per row") {
  MetricsRow r;
  r.planner = "fmp";
  r.agent_count = 4;
  r.world_size = "8x8";
  r.n_cases = 50;
  r.pct_success = 98.0;
  r.pct_collision = 0.0;
  r.pct_stuck = 2.0;
  r.mean_extra_time = 0.75;
  std::vector<MetricsRow> rows = {r, r};
  std::string csv = metrics_csv(rows);
  CHECK(csv.rfind("planner,agent_count,world_size,n_cases,pct_success,"
                  "pct_collision,pct_stuck,mean_extra_time,frac_policy,"
                  "frac_fmp_high_risk,frac_fmp_simple,frac_fmp_stuck\n",
                  0) == 0);
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 3);
  CHECK(csv.find("fmp,4,8x8,50,98,") != std::string::npos);

  std::string md = summary_markdown(rows);
  CHECK(md.find("| fmp |") != std::string::npos);
}

TEST_CASE("outcome jsonl lines parse and carry the step partition") {
  WorldConfig w = WorldConfig::default_2d();
  auto suite = generate_scenarios(5, 3, w, 33);
  fmp::FmpConfig fc;
  auto planner = make_fmp_planner(fc);
  EvalOptions opt;
  EvalResult res = evaluate(*planner, suite, w, opt);

  std::string text = outcomes_jsonl(res.outcomes);
  std::istringstream in(text);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    std::string outcome = j.at("outcome").get<std::string>();
    CHECK((outcome == "success" || outcome == "collision" ||
           outcome == "stuck"));
    CHECK(j.at("agents").size() == 3);
    // a pure-force planner logs no policy steps
    CHECK(j.at("steps_policy").get<long long>() == 0);
    CHECK(j.at("steps_total").get<long long>() > 0);
    ++count;
  }
  CHECK(count == 5);
}

TEST_CASE("planner factory checks names and model requirements") {
  fmp::FmpConfig fc;
  hybrid::HybridConfig hc;
  CHECK(make_planner("straight", std::nullopt, fc, hc)->name() == "straight");
  CHECK(make_planner("fmp", std::nullopt, fc, hc)->name() == "fmp");
  CHECK_THROWS_AS((void)make_planner("policy", std::nullopt, fc, hc), Error);
  CHECK_THROWS_AS((void)make_planner("hybrid", std::nullopt, fc, hc), Error);
  CHECK_THROWS_AS((void)make_planner("rvo", std::nullopt, fc, hc), Error);

  auto model = policy::PolicyModel::init(2, 1);
  auto p = make_planner("policy", model, fc, hc);
  CHECK(p->name() == "policy");
  CHECK(p->dimension() == 2);

  // planner/scenario dimension mismatches are rejected up front
  WorldConfig w3 = WorldConfig::default_3d();
  auto suite3 = generate_scenarios(2, 2, w3, 5);
  EvalOptions opt;
  CHECK_THROWS_AS((void)evaluate(*p, suite3, w3, opt), Error);
}

TEST_CASE("four-agent crossing under forces stays collision free") {
  // two orthogonal head-on pairs through a common center
  Scenario s;
  s.label = "crossing";
  s.world = WorldConfig::default_2d();
  auto mk = [](int id, double x, double y, double gx, double gy) {
    AgentState a;
    a.id = id;
    a.position = Vec(x, y);
    a.goal = Vec(gx, gy);
    a.preferred_speed = 1.0;
    a.heading_psi = std::atan2(gy - y, gx - x);
    return a;
  };
  s.agents = {mk(0, 1.0, 4.0, 7.0, 4.0), mk(1, 7.0, 4.0, 1.0, 4.0),
              mk(2, 4.0, 1.0, 4.0, 7.0), mk(3, 4.0, 7.0, 4.0, 1.0)};
  s.validate();

  fmp::FmpConfig fc;
  auto planner = make_fmp_planner(fc);
  EvalOptions opt;
  opt.safety_assertions = true;
  opt.record_trajectories = true;
  std::vector<Scenario> suite = {s};
  EvalResult res = evaluate(*planner, suite, s.world, opt);
  CHECK(res.outcomes[0].outcome != ScenarioOutcome::collision);
  REQUIRE(res.outcomes[0].final_state.has_value());

  // rendering is deterministic and draws one path per agent
  const EpisodeState& fin = *res.outcomes[0].final_state;
  std::string svg1 = render_svg(s, fin.trajectory);
  std::string svg2 = render_svg(s, fin.trajectory);
  CHECK(svg1 == svg2);
  CHECK(svg1.rfind("<svg", 0) == 0);
  std::size_t polylines = 0;
  for (std::size_t at = svg1.find("<polyline"); at != std::string::npos;
       at = svg1.find("<polyline", at + 1))
    ++polylines;
  CHECK(polylines >= 4);
  CHECK_THROWS_AS((void)render_svg(s, std::vector<StepRecord>{}), Error);
}

TEST_CASE("hybrid planner accounts every step to one mode") {
  WorldConfig w = WorldConfig::default_2d();
  auto suite = generate_scenarios(6, 4, w, 55);
  auto model = policy::PolicyModel::init(2, 2);
  fmp::FmpConfig fc;
  hybrid::HybridConfig hc;
  auto planner = make_hybrid_planner(model, fc, hc);
  EvalOptions opt;
  EvalResult res = evaluate(*planner, suite, w, opt);
  for (const auto& o : res.outcomes) {
    CHECK(o.steps_total == o.steps_policy + o.steps_fmp_high_risk +
                               o.steps_fmp_simple + o.steps_fmp_stuck);
  }
  double fracs = res.metrics.frac_policy + res.metrics.frac_fmp_high_risk +
                 res.metrics.frac_fmp_simple + res.metrics.frac_fmp_stuck;
  CHECK(fracs == doctest::Approx(1.0).epsilon(1e-9));
}
