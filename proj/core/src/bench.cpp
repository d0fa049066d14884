#include "swarmnav/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "io_util.hpp"

namespace swarmnav::bench {

namespace {

constexpr int kMaxPlacementTries = 10000;
constexpr double kPlacementMargin = 0.1;  // m of clearance between surfaces

Vec uniform_interior(Rng& rng, const WorldConfig& world, double radius) {
  if (world.dimension == 2)
    return Vec(rng.uniform(radius, world.extents[0] - radius),
               rng.uniform(radius, world.extents[1] - radius));
  return Vec(rng.uniform(radius, world.extents[0] - radius),
             rng.uniform(radius, world.extents[1] - radius),
             rng.uniform(radius, world.extents[2] - radius));
}

void face_goal(AgentState& a) {
  Vec d = a.goal - a.position;
  double len = d.norm();
  if (len < 1e-12) return;  // starts on its goal; default heading is fine
  a.heading_psi = std::atan2(d[1], d[0]);
  if (a.position.dim() == 3)
    a.heading_phi = std::acos(std::clamp(d[2] / len, -1.0, 1.0));
}

}  // namespace

Scenario sample_scenario(Rng& rng, int agent_count, const WorldConfig& world) {
  world.validate();
  require(agent_count >= 1, ErrorCategory::config,
          "agent count must be >= 1");
  for (int i = 0; i < world.dimension; ++i)
    require(world.extents[i] > 2.0 * 0.8, ErrorCategory::config,
            "world too small for the sampled radius range");

  Scenario sc;
  sc.world = world;
  sc.agents.resize(static_cast<std::size_t>(agent_count));
  for (int i = 0; i < agent_count; ++i) {
    AgentState& a = sc.agents[static_cast<std::size_t>(i)];
    a.id = i;
    a.radius = rng.uniform(0.2, 0.8);
    a.preferred_speed = rng.uniform(0.5, 2.0);
    a.velocity = world.dimension == 2 ? Vec(0.0, 0.0) : Vec(0.0, 0.0, 0.0);
  }

  // Starts: pairwise surface clearance of kPlacementMargin.
  for (int i = 0; i < agent_count; ++i) {
    AgentState& a = sc.agents[static_cast<std::size_t>(i)];
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementTries; ++attempt) {
      Vec p = uniform_interior(rng, world, a.radius);
      bool clear = true;
      for (int j = 0; j < i; ++j) {
        const AgentState& b = sc.agents[static_cast<std::size_t>(j)];
        if (surface_distance(p, a.radius, b.position, b.radius) <
            kPlacementMargin) {
          clear = false;
          break;
        }
      }
      if (clear) {
        a.position = p;
        placed = true;
        break;
      }
    }
    require(placed, ErrorCategory::capacity,
            "could not place " + std::to_string(agent_count) +
                " agents in this world (start positions too dense)");
  }

  // Goals: pairwise center separation of combined radii plus the margin, so
  // every agent can sit on its goal without touching another parked agent.
  for (int i = 0; i < agent_count; ++i) {
    AgentState& a = sc.agents[static_cast<std::size_t>(i)];
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementTries; ++attempt) {
      Vec g = uniform_interior(rng, world, a.radius);
      bool clear = true;
      for (int j = 0; j < i; ++j) {
        const AgentState& b = sc.agents[static_cast<std::size_t>(j)];
        if (distance(g, b.goal) < a.radius + b.radius + kPlacementMargin) {
          clear = false;
          break;
        }
      }
      if (clear) {
        a.goal = g;
        placed = true;
        break;
      }
    }
    require(placed, ErrorCategory::capacity,
            "could not place " + std::to_string(agent_count) +
                " goals in this world (goals too dense)");
  }

  for (auto& a : sc.agents) face_goal(a);
  sc.validate();
  return sc;
}

std::vector<Scenario> generate_scenarios(int n, int agent_count,
                                         const WorldConfig& world,
                                         std::uint64_t seed) {
  require(n >= 1, ErrorCategory::config, "scenario count must be >= 1");
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t si = derive_seed(seed, 0x5343454Eull,
                                   static_cast<std::uint64_t>(i),
                                   static_cast<std::uint64_t>(agent_count));
    Rng rng(si);
    Scenario sc = sample_scenario(rng, agent_count, world);
    sc.seed = si;
    char label[64];
    std::snprintf(label, sizeof(label), "n%d-%03d", agent_count, i);
    sc.label = label;
    out.push_back(std::move(sc));
  }
  return out;
}

double extra_time(const AgentState& initial_agent, double t_goal, double dt) {
  require(std::isfinite(t_goal) && t_goal >= 0.0, ErrorCategory::config,
          "t_goal must be finite and >= 0");
  require(std::isfinite(dt) && dt > 0.0, ErrorCategory::config,
          "dt must be positive");
  double straight = initial_agent.goal_distance() /
                    initial_agent.preferred_speed;
  return std::max(t_goal - straight, -dt);
}

namespace {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * 3.141592653589793238462643383279502884);
  if (r == -3.141592653589793238462643383279502884)
    r = 3.141592653589793238462643383279502884;
  return r;
}

class StraightPlanner final : public Planner {
 public:
  std::string name() const override { return "straight"; }
  int dimension() const override { return 0; }
  std::vector<PlannedCommand> plan(const EpisodeState& state) const override {
    std::vector<PlannedCommand> out;
    for (const AgentState& a : state.agents) {
      if (a.status != AgentStatus::active) continue;
      Action act;
      Vec d = a.goal - a.position;
      double dist = d.norm();
      if (dist > 1e-12) {
        double psi_des = std::atan2(d[1], d[0]);
        act.dpsi = std::clamp(wrap_angle(psi_des - a.heading_psi),
                              -kMaxHeadingStep, kMaxHeadingStep);
        if (state.world.dimension == 3) {
          double phi_des = std::acos(std::clamp(d[2] / dist, -1.0, 1.0));
          act.dphi = std::clamp(phi_des - a.heading_phi, -kMaxHeadingStep,
                                kMaxHeadingStep);
        }
        act.speed =
            std::min(a.preferred_speed, dist / state.world.dt);
      }
      out.push_back(PlannedCommand{
          AgentCommand{a.id, act, ControllerMode::policy},
          hybrid::Reason::normal});
    }
    return out;
  }
};

class FmpPlanner final : public Planner {
 public:
  explicit FmpPlanner(const fmp::FmpConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
  }
  std::string name() const override { return "fmp"; }
  int dimension() const override { return 0; }
  std::vector<PlannedCommand> plan(const EpisodeState& state) const override {
    std::vector<PlannedCommand> out;
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
      const AgentState& a = state.agents[i];
      if (a.status != AgentStatus::active) continue;
      std::vector<ObservableState> bodies =
          sensed_bodies(state, static_cast<int>(i));
      Action act = fmp::plan_action(a, bodies, cfg_, state.world.dt,
                                    state.world.v_max(a.preferred_speed));
      out.push_back(PlannedCommand{AgentCommand{a.id, act, ControllerMode::fmp},
                                   hybrid::Reason::normal});
    }
    return out;
  }

 private:
  fmp::FmpConfig cfg_;
};

class PolicyPlanner final : public Planner {
 public:
  explicit PolicyPlanner(policy::PolicyModel model)
      : model_(std::move(model)),
        space_(policy::ActionSpace::for_dimension(model_.dimension)) {
    model_.validate();
  }
  std::string name() const override { return "policy"; }
  int dimension() const override { return model_.dimension; }
  std::vector<PlannedCommand> plan(const EpisodeState& state) const override {
    std::vector<PlannedCommand> out;
    for (const AgentState& a : state.agents) {
      if (a.status != AgentStatus::active) continue;
      std::vector<double> obs = observe(state, a.id);
      int idx = policy::greedy_action(model_.forward(obs).probs);
      out.push_back(PlannedCommand{
          AgentCommand{a.id, space_.decode(idx, a.preferred_speed),
                       ControllerMode::policy},
          hybrid::Reason::normal});
    }
    return out;
  }

 private:
  policy::PolicyModel model_;
  policy::ActionSpace space_;
};

class HybridPlanner final : public Planner {
 public:
  HybridPlanner(policy::PolicyModel model, const fmp::FmpConfig& fmp_cfg,
                const hybrid::HybridConfig& cfg)
      : model_(std::move(model)),
        space_(policy::ActionSpace::for_dimension(model_.dimension)),
        fmp_cfg_(fmp_cfg), cfg_(cfg) {
    model_.validate();
    fmp_cfg_.validate();
    cfg_.validate();
  }
  std::string name() const override { return "hybrid"; }
  int dimension() const override { return model_.dimension; }
  std::vector<PlannedCommand> plan(const EpisodeState& state) const override {
    std::vector<PlannedCommand> out;
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
      const AgentState& a = state.agents[i];
      if (a.status != AgentStatus::active) continue;
      hybrid::Decision d = hybrid::plan_action(state, static_cast<int>(i),
                                               model_, space_, fmp_cfg_, cfg_);
      out.push_back(PlannedCommand{
          AgentCommand{a.id, d.action, d.choice.mode}, d.choice.reason});
    }
    return out;
  }

 private:
  policy::PolicyModel model_;
  policy::ActionSpace space_;
  fmp::FmpConfig fmp_cfg_;
  hybrid::HybridConfig cfg_;
};

}  // namespace

std::unique_ptr<Planner> make_straight_planner() {
  return std::make_unique<StraightPlanner>();
}

std::unique_ptr<Planner> make_fmp_planner(const fmp::FmpConfig& cfg) {
  return std::make_unique<FmpPlanner>(cfg);
}

std::unique_ptr<Planner> make_policy_planner(policy::PolicyModel model) {
  return std::make_unique<PolicyPlanner>(std::move(model));
}

std::unique_ptr<Planner> make_hybrid_planner(policy::PolicyModel model,
                                             const fmp::FmpConfig& fmp_cfg,
                                             const hybrid::HybridConfig& cfg) {
  return std::make_unique<HybridPlanner>(std::move(model), fmp_cfg, cfg);
}

std::unique_ptr<Planner> make_planner(const std::string& name,
                                      std::optional<policy::PolicyModel> model,
                                      const fmp::FmpConfig& fmp_cfg,
                                      const hybrid::HybridConfig& hybrid_cfg) {
  if (name == "straight") return make_straight_planner();
  if (name == "fmp") return make_fmp_planner(fmp_cfg);
  if (name == "policy" || name == "hybrid") {
    require(model.has_value(), ErrorCategory::config,
            "planner \"" + name + "\" needs a model");
    if (name == "policy") return make_policy_planner(std::move(*model));
    return make_hybrid_planner(std::move(*model), fmp_cfg, hybrid_cfg);
  }
  fail(ErrorCategory::config, "unknown planner \"" + name +
                                  "\" (expected straight|fmp|policy|hybrid)");
}

namespace {

RunOutcome run_scenario(const Planner& planner, Scenario scenario,
                        const WorldConfig& eval_world,
                        const EvalOptions& options) {
  scenario.world = eval_world;
  EpisodeState st = EpisodeState::start(scenario, options.record_trajectories);

  RunOutcome out;
  out.label = scenario.label;
  out.scenario_seed = scenario.seed;

  TerminationReport term = episode_terminated(st);
  while (!term.done) {
    std::vector<PlannedCommand> plans = planner.plan(st);
    std::vector<AgentCommand> cmds;
    cmds.reserve(plans.size());
    for (const PlannedCommand& pc : plans) {
      cmds.push_back(pc.command);
      out.steps_total += 1;
      if (pc.command.mode == ControllerMode::policy) {
        out.steps_policy += 1;
      } else {
        switch (pc.reason) {
          case hybrid::Reason::high_risk: out.steps_fmp_high_risk += 1; break;
          case hybrid::Reason::simple: out.steps_fmp_simple += 1; break;
          case hybrid::Reason::stuck: out.steps_fmp_stuck += 1; break;
          case hybrid::Reason::normal: break;  // pure-FMP planner
        }
      }
    }
    StepEffects eff = step(st, cmds);
    if (options.safety_assertions) {
      for (std::size_t i = 0; i < st.agents.size(); ++i) {
        require(st.agents[i].status == AgentStatus::collided ||
                    !(eff.agents[i].min_surface_after < 0.0),
                ErrorCategory::internal,
                "overlap without a collision flag (harness bug)");
      }
    }
    term = episode_terminated(st);
  }

  out.outcome = term.scenario;
  out.steps = st.step_count;
  out.duration = st.t;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double extra_sum = 0.0;
  int extra_n = 0;
  for (std::size_t i = 0; i < st.agents.size(); ++i) {
    AgentResult r;
    r.id = st.agents[i].id;
    r.outcome = term.outcomes[i];
    if (r.outcome == AgentOutcome::success) {
      r.t_goal = st.arrival_times[i];
      r.extra_time = extra_time(scenario.agents[i], r.t_goal, eval_world.dt);
      extra_sum += r.extra_time;
      extra_n += 1;
    } else {
      r.t_goal = nan;
      r.extra_time = nan;
    }
    out.agents.push_back(r);
  }
  out.mean_extra_time = (out.outcome == ScenarioOutcome::success && extra_n)
                            ? extra_sum / extra_n
                            : nan;
  if (options.record_trajectories) out.final_state = std::move(st);
  return out;
}

std::string world_size_string(const WorldConfig& w) {
  char buf[96];
  if (w.dimension == 2)
    std::snprintf(buf, sizeof(buf), "%gx%g", w.extents[0], w.extents[1]);
  else
    std::snprintf(buf, sizeof(buf), "%gx%gx%g", w.extents[0], w.extents[1],
                  w.extents[2]);
  return buf;
}

}  // namespace

EvalResult evaluate(const Planner& planner, std::span<const Scenario> scenarios,
                    const WorldConfig& eval_world, const EvalOptions& options) {
  eval_world.validate();
  require(!scenarios.empty(), ErrorCategory::config,
          "evaluate needs at least one scenario");
  require(options.workers >= 1, ErrorCategory::config,
          "workers must be >= 1");
  require(planner.dimension() == 0 ||
              planner.dimension() == eval_world.dimension,
          ErrorCategory::model,
          "planner dimension does not match the evaluation world");
  for (const Scenario& sc : scenarios)
    require(sc.world.dimension == eval_world.dimension, ErrorCategory::config,
            "scenario dimension does not match the evaluation world");

  EvalResult result;
  result.outcomes.resize(scenarios.size());

  int workers = std::min<int>(options.workers,
                              static_cast<int>(scenarios.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i)
      result.outcomes[i] =
          run_scenario(planner, scenarios[i], eval_world, options);
  } else {
    // Index-claimed work queue; outcomes land at their scenario index, so
    // the result is identical to the sequential order.
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::string> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int wix = 0; wix < workers; ++wix) {
      pool.emplace_back([&, wix] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= scenarios.size() || failed.load()) return;
          try {
            result.outcomes[i] =
                run_scenario(planner, scenarios[i], eval_world, options);
          } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(wix)] = e.what();
            failed.store(true);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) {
      for (const auto& msg : errors)
        if (!msg.empty()) fail(ErrorCategory::internal, msg);
      fail(ErrorCategory::internal, "parallel evaluation failed");
    }
  }

  MetricsRow& m = result.metrics;
  m.planner = planner.name();
  m.world_size = world_size_string(eval_world);
  m.n_cases = static_cast<int>(scenarios.size());
  m.agent_count = static_cast<int>(scenarios.front().agents.size());
  for (const Scenario& sc : scenarios)
    if (static_cast<int>(sc.agents.size()) != m.agent_count) {
      m.agent_count = 0;  // mixed suite
      break;
    }

  int n_success = 0, n_collision = 0, n_stuck = 0;
  double extra_sum = 0.0;
  int extra_n = 0;
  std::int64_t st_total = 0, st_policy = 0, st_hr = 0, st_simple = 0,
               st_stuck = 0;
  for (const RunOutcome& o : result.outcomes) {
    switch (o.outcome) {
      case ScenarioOutcome::success: n_success += 1; break;
      case ScenarioOutcome::collision: n_collision += 1; break;
      case ScenarioOutcome::stuck: n_stuck += 1; break;
    }
    if (o.outcome == ScenarioOutcome::success &&
        std::isfinite(o.mean_extra_time)) {
      extra_sum += o.mean_extra_time;
      extra_n += 1;
    }
    st_total += o.steps_total;
    st_policy += o.steps_policy;
    st_hr += o.steps_fmp_high_risk;
    st_simple += o.steps_fmp_simple;
    st_stuck += o.steps_fmp_stuck;
  }
  double n = static_cast<double>(m.n_cases);
  m.pct_success = 100.0 * n_success / n;
  m.pct_collision = 100.0 * n_collision / n;
  m.pct_stuck = 100.0 * n_stuck / n;
  m.mean_extra_time = extra_n ? extra_sum / extra_n
                              : std::numeric_limits<double>::quiet_NaN();
  if (st_total > 0) {
    double t = static_cast<double>(st_total);
    m.frac_policy = static_cast<double>(st_policy) / t;
    m.frac_fmp_high_risk = static_cast<double>(st_hr) / t;
    m.frac_fmp_simple = static_cast<double>(st_simple) / t;
    m.frac_fmp_stuck = static_cast<double>(st_stuck) / t;
  }
  return result;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out =
      "planner,agent_count,world_size,n_cases,pct_success,pct_collision,"
      "pct_stuck,mean_extra_time,frac_policy,frac_fmp_high_risk,"
      "frac_fmp_simple,frac_fmp_stuck\n";
  char line[512];
  for (const MetricsRow& r : rows) {
    std::snprintf(line, sizeof(line),
                  "%s,%d,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g\n",
                  r.planner.c_str(), r.agent_count, r.world_size.c_str(),
                  r.n_cases, r.pct_success, r.pct_collision, r.pct_stuck,
                  r.mean_extra_time, r.frac_policy, r.frac_fmp_high_risk,
                  r.frac_fmp_simple, r.frac_fmp_stuck);
    out += line;
  }
  return out;
}

std::string summary_markdown(std::span<const MetricsRow> rows) {
  std::string out =
      "| planner | agents | world | cases | success % | collision % | "
      "stuck % | extra time (s) | policy | fmp:risk | fmp:simple | "
      "fmp:stuck |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  char buf[96];
  auto num = [&buf](double v, const char* fmtstr) -> std::string {
    if (!std::isfinite(v)) return "-";
    std::snprintf(buf, sizeof(buf), fmtstr, v);
    return buf;
  };
  for (const MetricsRow& r : rows) {
    out += "| " + r.planner + " | " + std::to_string(r.agent_count) + " | " +
           r.world_size + " | " + std::to_string(r.n_cases) + " | " +
           num(r.pct_success, "%.1f") + " | " + num(r.pct_collision, "%.1f") +
           " | " + num(r.pct_stuck, "%.1f") + " | " +
           num(r.mean_extra_time, "%.3f") + " | " +
           num(r.frac_policy, "%.3f") + " | " +
           num(r.frac_fmp_high_risk, "%.3f") + " | " +
           num(r.frac_fmp_simple, "%.3f") + " | " +
           num(r.frac_fmp_stuck, "%.3f") + " |\n";
  }
  return out;
}

std::string outcomes_jsonl(std::span<const RunOutcome> outcomes) {
  using detail::json;
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  std::string out;
  for (const RunOutcome& o : outcomes) {
    json j;
    j["label"] = o.label;
    j["scenario_seed"] = o.scenario_seed;
    j["outcome"] = to_string(o.outcome);
    j["steps"] = o.steps;
    j["duration"] = o.duration;
    json agents = json::array();
    for (const AgentResult& a : o.agents) {
      json ja;
      ja["id"] = a.id;
      ja["outcome"] = to_string(a.outcome);
      ja["t_goal"] = finite_or_null(a.t_goal);
      ja["extra_time"] = finite_or_null(a.extra_time);
      agents.push_back(std::move(ja));
    }
    j["agents"] = std::move(agents);
    j["steps_total"] = o.steps_total;
    j["steps_policy"] = o.steps_policy;
    j["steps_fmp_high_risk"] = o.steps_fmp_high_risk;
    j["steps_fmp_simple"] = o.steps_fmp_simple;
    j["steps_fmp_stuck"] = o.steps_fmp_stuck;
    j["mean_extra_time"] = finite_or_null(o.mean_extra_time);
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                            "#bcbd22", "#17becf"};

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Scenario& scenario,
                       std::span<const StepRecord> trajectory) {
  require(!trajectory.empty(), ErrorCategory::config,
          "cannot render an empty trajectory");
  const WorldConfig& w = scenario.world;
  const double margin = 24.0;
  const double scale = 640.0 / w.extents[0];
  const double width = 640.0 + 2.0 * margin;
  const double height = w.extents[1] * scale + 2.0 * margin;
  auto X = [&](double x) { return margin + x * scale; };
  auto Y = [&](double y) { return margin + (w.extents[1] - y) * scale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) +
         "\" height=\"" + fmt2(height) + "\" viewBox=\"0 0 " + fmt2(width) +
         " " + fmt2(height) + "\">\n";
  svg += "<rect x=\"" + fmt2(margin) + "\" y=\"" + fmt2(margin) +
         "\" width=\"" + fmt2(640.0) + "\" height=\"" +
         fmt2(w.extents[1] * scale) +
         "\" fill=\"#fcfcfc\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  if (w.dimension == 3)
    svg += "<text x=\"" + fmt2(margin) + "\" y=\"" + fmt2(margin - 8.0) +
           "\" font-family=\"monospace\" font-size=\"12\">top-down "
           "projection, z ignored</text>\n";

  const std::size_t n = scenario.agents.size();
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = scenario.agents[i];
    const char* color = kPalette[i % 10];

    // Start body and goal marker.
    svg += "<circle cx=\"" + fmt2(X(a.position[0])) + "\" cy=\"" +
           fmt2(Y(a.position[1])) + "\" r=\"" + fmt2(a.radius * scale) +
           "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"" +
           color + "\" stroke-dasharray=\"3 3\"/>\n";
    double gx = X(a.goal[0]), gy = Y(a.goal[1]);
    svg += "<path d=\"M " + fmt2(gx - 6.0) + " " + fmt2(gy) + " L " +
           fmt2(gx + 6.0) + " " + fmt2(gy) + " M " + fmt2(gx) + " " +
           fmt2(gy - 6.0) + " L " + fmt2(gx) + " " + fmt2(gy + 6.0) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";

    // Path polyline; agents are recorded in a fixed order per record.
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"";
    bool collided_marked = false;
    std::string collision_mark;
    for (const StepRecord& rec : trajectory) {
      require(rec.agents.size() == n, ErrorCategory::config,
              "trajectory does not match the scenario agent count");
      const StepAgentRecord& ar = rec.agents[i];
      svg += fmt2(X(ar.position[0])) + "," + fmt2(Y(ar.position[1])) + " ";
      if (!collided_marked && ar.status == AgentStatus::collided) {
        collided_marked = true;
        double cx = X(ar.position[0]), cy = Y(ar.position[1]);
        collision_mark = "<path d=\"M " + fmt2(cx - 5.0) + " " +
                         fmt2(cy - 5.0) + " L " + fmt2(cx + 5.0) + " " +
                         fmt2(cy + 5.0) + " M " + fmt2(cx - 5.0) + " " +
                         fmt2(cy + 5.0) + " L " + fmt2(cx + 5.0) + " " +
                         fmt2(cy - 5.0) +
                         "\" stroke=\"#d00\" stroke-width=\"2.5\"/>\n";
      }
    }
    svg += "\"/>\n";

    // Final body outline.
    const StepAgentRecord& last = trajectory.back().agents[i];
    svg += "<circle cx=\"" + fmt2(X(last.position[0])) + "\" cy=\"" +
           fmt2(Y(last.position[1])) + "\" r=\"" + fmt2(a.radius * scale) +
           "\" fill=\"" + color + "\" fill-opacity=\"0.45\" stroke=\"" +
           color + "\"/>\n";
    svg += collision_mark;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace swarmnav::bench
