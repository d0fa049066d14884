// Command-line front end: wires JSON config files to the library modules.
// Every command validates its whole config before doing any work, writes all
// outputs under --out, and drops a manifest.json (config snapshot, effective
// seed, code version) next to them. Manifests carry no timestamps, so a
// re-run with the same inputs reproduces the output directory byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <swarmnav/bench.hpp>
#include <swarmnav/env.hpp>
#include <swarmnav/error.hpp>
#include <swarmnav/scenario_io.hpp>
#include <swarmnav/trainer.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace swarmnav;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::capacity: return 3;
    case ErrorCategory::model: return 4;
    case ErrorCategory::io:
    case ErrorCategory::internal: return 1;
  }
  return 1;
}

ordered_json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCategory::io, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCategory::config,
         path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCategory::io, "cannot write " + path.string());
  out << content;
  require(out.good(), ErrorCategory::io, "write failed for " + path.string());
}

// Typo guard: configs are the single source of truth, so an ignored key is
// almost certainly a mistake.
void require_known_keys(const ordered_json& j, const char* where,
                        std::initializer_list<const char*> known) {
  require(j.is_object(), ErrorCategory::config,
          std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, ErrorCategory::config,
            std::string("unknown key \"") + key + "\" in " + where);
  }
}

double get_number(const ordered_json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), ErrorCategory::config,
          std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const ordered_json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number_integer(), ErrorCategory::config,
          std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

WorldConfig parse_world(const ordered_json& j, WorldConfig base) {
  require_known_keys(j, "world",
                     {"dimension", "extents", "dt", "t_max", "neighbor_radius",
                      "v_max_factor"});
  int dim = get_int(j, "dimension", base.dimension);
  if (dim != base.dimension)
    base = dim == 3 ? WorldConfig::default_3d() : WorldConfig::default_2d();
  if (j.contains("extents")) {
    const auto& e = j.at("extents");
    require(e.is_array() && (int)e.size() == base.dimension,
            ErrorCategory::config,
            "extents must be an array of dimension length");
    base.extents = base.dimension == 3
                       ? Vec(e[0].get<double>(), e[1].get<double>(),
                             e[2].get<double>())
                       : Vec(e[0].get<double>(), e[1].get<double>());
  }
  base.dt = get_number(j, "dt", base.dt);
  base.t_max = get_number(j, "t_max", base.t_max);
  base.neighbor_radius = get_number(j, "neighbor_radius", base.neighbor_radius);
  base.v_max_factor = get_number(j, "v_max_factor", base.v_max_factor);
  base.validate();
  return base;
}

fmp::FmpConfig parse_fmp(const ordered_json& j) {
  fmp::FmpConfig cfg;
  require_known_keys(j, "fmp", {"rho", "c1", "c2"});
  cfg.rho = get_number(j, "rho", cfg.rho);
  cfg.c1 = get_number(j, "c1", cfg.c1);
  cfg.c2 = get_number(j, "c2", cfg.c2);
  cfg.validate();
  return cfg;
}

hybrid::HybridConfig parse_hybrid(const ordered_json& j) {
  hybrid::HybridConfig cfg;
  require_known_keys(j, "hybrid", {"c_stuck"});
  cfg.c_stuck = get_int(j, "c_stuck", cfg.c_stuck);
  cfg.validate();
  return cfg;
}

// Options shared by the commands; subcommands register the subset they use.
struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0 = available parallelism
  bool deterministic = false;
  std::string planner;  // override for the config's planner block
  std::string model;    // override for the config's model path
};

int effective_workers(const CliOptions& opt) {
  if (opt.deterministic) return 1;
  if (opt.workers > 0) return opt.workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : (int)hw;
}

fs::path prepare_out_dir(const CliOptions& opt) {
  fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCategory::io, "cannot create " + dir.string());
  return dir;
}

void write_manifest(const fs::path& dir, const char* command,
                    const ordered_json& resolved_config, std::uint64_t seed,
                    const std::vector<std::string>& outputs,
                    const std::string& notes = "") {
  ordered_json m;
  m["command"] = command;
  m["version"] = SWARMNAV_VERSION;
  m["seed"] = seed;
  m["config"] = resolved_config;
  m["outputs"] = outputs;
  if (!notes.empty()) m["notes"] = notes;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

// ---- planner construction shared by simulate / bench / render ------------

struct PlannerSpec {
  std::string kind = "fmp";
  std::string model_path;
  fmp::FmpConfig fmp;
  hybrid::HybridConfig hybrid;
};

PlannerSpec parse_planner_spec(const ordered_json& cfg, const CliOptions& opt) {
  PlannerSpec spec;
  if (cfg.contains("planner")) {
    require(cfg.at("planner").is_string(), ErrorCategory::config,
            "planner must be a string");
    spec.kind = cfg.at("planner").get<std::string>();
  }
  if (!opt.planner.empty()) spec.kind = opt.planner;
  require(spec.kind == "fmp" || spec.kind == "policy" || spec.kind == "hybrid" ||
              spec.kind == "straight",
          ErrorCategory::config,
          "planner must be one of fmp|policy|hybrid|straight");
  if (cfg.contains("model")) {
    require(cfg.at("model").is_string(), ErrorCategory::config,
            "model must be a path string");
    spec.model_path = cfg.at("model").get<std::string>();
  }
  if (!opt.model.empty()) spec.model_path = opt.model;
  if (cfg.contains("fmp")) spec.fmp = parse_fmp(cfg.at("fmp"));
  if (cfg.contains("hybrid")) spec.hybrid = parse_hybrid(cfg.at("hybrid"));
  return spec;
}

std::unique_ptr<bench::Planner> build_planner(const PlannerSpec& spec) {
  std::optional<policy::PolicyModel> model;
  if (spec.kind == "policy" || spec.kind == "hybrid") {
    require(!spec.model_path.empty(), ErrorCategory::config,
            spec.kind + " planner needs a model (config key or --model)");
    model = policy::load_model(spec.model_path);
  }
  return bench::make_planner(spec.kind, std::move(model), spec.fmp,
                             spec.hybrid);
}

ordered_json planner_spec_json(const PlannerSpec& spec) {
  ordered_json j;
  j["planner"] = spec.kind;
  if (!spec.model_path.empty()) j["model"] = spec.model_path;
  j["fmp"] = {{"rho", spec.fmp.rho}, {"c1", spec.fmp.c1}, {"c2", spec.fmp.c2}};
  j["hybrid"] = {{"c_stuck", spec.hybrid.c_stuck}};
  return j;
}

ordered_json world_json(const WorldConfig& w) {
  ordered_json j;
  j["dimension"] = w.dimension;
  j["extents"] = w.dimension == 3
                     ? ordered_json::array({w.extents.x(), w.extents.y(),
                                            w.extents.z()})
                     : ordered_json::array({w.extents.x(), w.extents.y()});
  j["dt"] = w.dt;
  j["t_max"] = w.t_max;
  j["neighbor_radius"] = w.neighbor_radius;
  j["v_max_factor"] = w.v_max_factor;
  return j;
}

ordered_json vec_json(const Vec& v, int dimension) {
  return dimension == 3 ? ordered_json::array({v.x(), v.y(), v.z()})
                        : ordered_json::array({v.x(), v.y()});
}

// ---- gen-scenarios --------------------------------------------------------

int cmd_gen(const CliOptions& opt) {
  ordered_json cfg = read_json_file(opt.config_path);
  require_known_keys(cfg, "gen-scenarios config",
                     {"count", "agent_count", "seed", "world"});
  int count = get_int(cfg, "count", 50);
  int agent_count = get_int(cfg, "agent_count", 4);
  WorldConfig world = parse_world(cfg.value("world", ordered_json::object()),
                                  WorldConfig::default_2d());
  std::uint64_t seed = opt.seed.value_or((std::uint64_t)get_int(cfg, "seed", 1));

  auto scenarios = bench::generate_scenarios(count, agent_count, world, seed);
  fs::path dir = prepare_out_dir(opt);
  save_scenarios(scenarios, dir / "scenarios.json");

  ordered_json resolved;
  resolved["count"] = count;
  resolved["agent_count"] = agent_count;
  resolved["world"] = world_json(world);
  write_manifest(dir, "gen-scenarios", resolved, seed, {"scenarios.json"});
  std::printf("wrote %d scenarios to %s\n", count,
              (dir / "scenarios.json").c_str());
  return 0;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const CliOptions& opt) {
  ordered_json cfg = read_json_file(opt.config_path);
  require_known_keys(cfg, "train config",
                     {"dimension", "seed", "gamma", "beta", "n_step",
                      "learning_rate", "parallel_envs", "reward", "world",
                      "stages"});
  int dimension = get_int(cfg, "dimension", 2);
  require(dimension == 2 || dimension == 3, ErrorCategory::config,
          "dimension must be 2 or 3");
  trainer::TrainConfig tc = trainer::TrainConfig::defaults(dimension);
  tc.gamma = get_number(cfg, "gamma", tc.gamma);
  tc.beta = get_number(cfg, "beta", tc.beta);
  tc.n_step = get_int(cfg, "n_step", tc.n_step);
  tc.learning_rate = get_number(cfg, "learning_rate", tc.learning_rate);
  tc.parallel_envs = get_int(cfg, "parallel_envs", tc.parallel_envs);
  tc.seed = opt.seed.value_or((std::uint64_t)get_int(cfg, "seed", 1));
  if (cfg.contains("reward")) {
    const auto& r = cfg.at("reward");
    require_known_keys(r, "reward", {"variant", "alpha"});
    if (r.contains("variant")) {
      std::string v = r.at("variant").get<std::string>();
      require(v == "nsl" || v == "legacy", ErrorCategory::config,
              "reward.variant must be nsl or legacy");
      tc.reward = v == "nsl" ? reward::RewardConfig::nsl_defaults()
                             : reward::RewardConfig::legacy_defaults();
    }
    tc.reward.alpha = get_number(r, "alpha", tc.reward.alpha);
  }
  if (cfg.contains("world")) tc.world = parse_world(cfg.at("world"), tc.world);
  if (cfg.contains("stages")) {
    const auto& st = cfg.at("stages");
    require(st.is_array() && !st.empty(), ErrorCategory::config,
            "stages must be a non-empty array");
    tc.stages.clear();
    for (const auto& s : st) {
      require_known_keys(s, "stage", {"agent_count", "episode_budget"});
      trainer::StageConfig sc;
      sc.agent_count = get_int(s, "agent_count", 2);
      sc.episode_budget = get_int(s, "episode_budget", 20000);
      tc.stages.push_back(sc);
    }
  }
  tc.validate();

  auto result = trainer::train_curriculum(tc);

  fs::path dir = prepare_out_dir(opt);
  std::vector<std::string> outputs;
  policy::save_model(result.model, dir / "model.json");
  outputs.push_back("model.json");
  for (std::size_t k = 0; k < result.stage_checkpoints.size(); ++k) {
    std::string name = "model.stage" + std::to_string(k) + ".json";
    policy::save_model(result.stage_checkpoints[k], dir / name);
    outputs.push_back(name);
  }
  write_text_file(dir / "curve.csv", trainer::curve_csv(result.curve));
  outputs.push_back("curve.csv");

  ordered_json resolved;
  resolved["dimension"] = dimension;
  resolved["gamma"] = tc.gamma;
  resolved["beta"] = tc.beta;
  resolved["n_step"] = tc.n_step;
  resolved["learning_rate"] = tc.learning_rate;
  resolved["parallel_envs"] = tc.parallel_envs;
  resolved["reward"] = {{"variant", reward::to_string(tc.reward.variant)},
                        {"alpha", tc.reward.alpha}};
  resolved["world"] = world_json(tc.world);
  resolved["stages"] = ordered_json::array();
  for (const auto& s : tc.stages)
    resolved["stages"].push_back({{"agent_count", s.agent_count},
                                  {"episode_budget", s.episode_budget}});
  write_manifest(dir, "train", resolved, tc.seed, outputs, result.note);

  if (!result.curve.empty())
    std::printf("trained %zu episodes, final rolling reward %.4f\n",
                result.curve.size(), result.curve.back().rolling);
  if (result.diverged)
    std::fprintf(stderr, "swarmnav: warning: %s\n", result.note.c_str());
  return 0;
}

// ---- bench ----------------------------------------------------------------

int cmd_bench(const CliOptions& opt) {
  ordered_json cfg = read_json_file(opt.config_path);
  require_known_keys(cfg, "bench config",
                     {"planner", "model", "fmp", "hybrid", "agent_counts",
                      "cases_per_count", "seed", "world",
                      "safety_assertions"});
  PlannerSpec spec = parse_planner_spec(cfg, opt);
  auto planner = build_planner(spec);

  std::vector<int> agent_counts = {2, 4, 6, 8, 10};
  if (cfg.contains("agent_counts")) {
    const auto& a = cfg.at("agent_counts");
    require(a.is_array() && !a.empty(), ErrorCategory::config,
            "agent_counts must be a non-empty array");
    agent_counts.clear();
    for (const auto& v : a) agent_counts.push_back(v.get<int>());
  }
  int cases = get_int(cfg, "cases_per_count", 50);
  WorldConfig world = parse_world(cfg.value("world", ordered_json::object()),
                                  WorldConfig::default_2d());
  std::uint64_t seed = opt.seed.value_or((std::uint64_t)get_int(cfg, "seed", 1));

  bench::EvalOptions eval_opt;
  eval_opt.safety_assertions = cfg.value("safety_assertions", false);
  eval_opt.workers = effective_workers(opt);

  std::vector<bench::MetricsRow> rows;
  std::string jsonl;
  for (int n : agent_counts) {
    auto scenarios = bench::generate_scenarios(cases, n, world, seed);
    auto result = bench::evaluate(*planner, scenarios, world, eval_opt);
    rows.push_back(result.metrics);
    jsonl += bench::outcomes_jsonl(result.outcomes);
  }

  fs::path dir = prepare_out_dir(opt);
  write_text_file(dir / "metrics.csv", bench::metrics_csv(rows));
  write_text_file(dir / "summary.md", bench::summary_markdown(rows));
  write_text_file(dir / "outcomes.jsonl", jsonl);

  ordered_json resolved = planner_spec_json(spec);
  resolved["agent_counts"] = agent_counts;
  resolved["cases_per_count"] = cases;
  resolved["world"] = world_json(world);
  resolved["safety_assertions"] = eval_opt.safety_assertions;
  resolved["workers"] = eval_opt.workers;
  write_manifest(dir, "bench", resolved, seed,
                 {"metrics.csv", "summary.md", "outcomes.jsonl"});

  for (const auto& r : rows)
    std::printf("%s n=%d success %.1f%% collision %.1f%% stuck %.1f%%\n",
                r.planner.c_str(), r.agent_count, r.pct_success,
                r.pct_collision, r.pct_stuck);
  return 0;
}

// ---- simulate / render ----------------------------------------------------

struct PlannedCommandTag {
  int agent_id = 0;
  ControllerMode mode = ControllerMode::policy;
  hybrid::Reason reason = hybrid::Reason::normal;
};

struct EpisodeRun {
  Scenario scenario;
  EpisodeState state;
  // reason tag per step per agent id, aligned with state.trajectory[1..]
  std::vector<std::vector<PlannedCommandTag>> tags;
};

EpisodeRun run_episode(const Scenario& scenario, const bench::Planner& planner,
                       const WorldConfig& world) {
  Scenario staged = scenario;
  staged.world = world;
  staged.validate();
  EpisodeRun run{staged, EpisodeState::start(staged, true), {}};
  while (run.state.active_count() > 0 &&
         run.state.step_count < run.state.world.max_steps()) {
    auto planned = planner.plan(run.state);
    std::vector<AgentCommand> commands;
    std::vector<PlannedCommandTag> tags;
    commands.reserve(planned.size());
    for (const auto& p : planned) {
      commands.push_back(p.command);
      tags.push_back({p.command.agent_id, p.command.mode, p.reason});
    }
    step(run.state, commands);
    run.tags.push_back(std::move(tags));
  }
  return run;
}

ordered_json agent_outcomes_json(const EpisodeState& state,
                                 const Scenario& scenario) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const auto& a = state.agents[i];
    ordered_json o;
    o["id"] = a.id;
    o["status"] = to_string(a.status);
    if (a.status == AgentStatus::arrived) {
      double tg = state.arrival_times[i];
      o["t_goal"] = tg;
      o["extra_time"] =
          bench::extra_time(scenario.agents[i], tg, state.world.dt);
    }
    arr.push_back(o);
  }
  return arr;
}

int cmd_simulate(const CliOptions& opt, bool render_only) {
  ordered_json cfg = read_json_file(opt.config_path);
  require_known_keys(cfg, render_only ? "render config" : "simulate config",
                     {"scenario", "planner", "model", "fmp", "hybrid", "world",
                      "svg"});
  require(cfg.contains("scenario"), ErrorCategory::config,
          "config needs a scenario path");
  Scenario scenario = load_scenario(cfg.at("scenario").get<std::string>());
  WorldConfig world = cfg.contains("world")
                          ? parse_world(cfg.at("world"), scenario.world)
                          : scenario.world;
  PlannerSpec spec = parse_planner_spec(cfg, opt);
  auto planner = build_planner(spec);
  bool svg = render_only || cfg.value("svg", false);

  EpisodeRun run = run_episode(scenario, *planner, world);

  fs::path dir = prepare_out_dir(opt);
  std::vector<std::string> outputs;

  if (!render_only) {
    // One JSON line per step (t=0 snapshot included, commands from t>0).
    std::ostringstream log;
    for (std::size_t s = 0; s < run.state.trajectory.size(); ++s) {
      const auto& rec = run.state.trajectory[s];
      ordered_json line;
      line["t"] = rec.t;
      line["agents"] = ordered_json::array();
      for (const auto& ar : rec.agents) {
        ordered_json a;
        a["id"] = ar.id;
        a["position"] = vec_json(ar.position, world.dimension);
        a["velocity"] = vec_json(ar.velocity, world.dimension);
        a["status"] = to_string(ar.status);
        if (s > 0) {
          const auto& tags = run.tags[s - 1];
          for (const auto& t : tags)
            if (t.agent_id == ar.id) {
              a["controller"] = to_string(t.mode);
              a["mode"] = t.mode == ControllerMode::policy
                              ? "normal"
                              : hybrid::to_string(t.reason);
            }
        }
        line["agents"].push_back(a);
      }
      log << line.dump() << "\n";
    }
    write_text_file(dir / "trajectory.jsonl", log.str());
    outputs.push_back("trajectory.jsonl");

    ordered_json outcome;
    bool any_collided = false, all_arrived = true;
    for (const auto& a : run.state.agents) {
      any_collided = any_collided || a.status == AgentStatus::collided;
      all_arrived = all_arrived && a.status == AgentStatus::arrived;
    }
    outcome["outcome"] =
        any_collided ? "collision" : (all_arrived ? "success" : "stuck");
    outcome["duration"] = run.state.t;
    outcome["steps"] = run.state.step_count;
    outcome["agents"] = agent_outcomes_json(run.state, scenario);
    write_text_file(dir / "outcome.json", outcome.dump(2) + "\n");
    outputs.push_back("outcome.json");
  }

  if (svg) {
    write_text_file(dir / "trajectory.svg",
                    bench::render_svg(run.scenario, run.state.trajectory));
    outputs.push_back("trajectory.svg");
  }

  ordered_json resolved = planner_spec_json(spec);
  resolved["scenario"] = cfg.at("scenario").get<std::string>();
  resolved["world"] = world_json(world);
  write_manifest(dir, render_only ? "render" : "simulate", resolved,
                 scenario.seed, outputs);
  std::printf("%s steps=%d t=%.1fs -> %s\n", scenario.label.c_str(),
              run.state.step_count, run.state.t, dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized multi-agent motion planning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SWARMNAV_VERSION);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub, bool with_planner) {
    sub->add_option("--config", opt.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->required();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--workers", opt.workers,
                    "worker threads (default: available parallelism)");
    sub->add_flag("--deterministic", opt.deterministic,
                  "single-context execution");
    if (with_planner) {
      sub->add_option("--planner", opt.planner,
                      "planner override: fmp|policy|hybrid|straight");
      sub->add_option("--model", opt.model, "model file override");
    }
  };

  auto* train = app.add_subcommand("train", "train a policy curriculum");
  add_common(train, false);
  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  add_common(simulate, true);
  auto* bench_cmd = app.add_subcommand("bench", "benchmark a planner");
  add_common(bench_cmd, true);
  auto* render = app.add_subcommand("render", "plot one scenario as SVG");
  add_common(render, true);
  auto* gen = app.add_subcommand("gen-scenarios", "sample a scenario suite");
  add_common(gen, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::fprintf(stderr, "swarmnav: config: %s\n", e.what());
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(opt);
    if (simulate->parsed()) return cmd_simulate(opt, false);
    if (bench_cmd->parsed()) return cmd_bench(opt);
    if (render->parsed()) return cmd_simulate(opt, true);
    if (gen->parsed()) return cmd_gen(opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "swarmnav: %s\n", e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "swarmnav: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
