#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmnav/hybrid.hpp"
#include "swarmnav/scenario_io.hpp"

namespace swarmnav::bench {

/// Random scenario with uniform radii in [0.2, 0.8] m, preferred speeds in
/// [0.5, 2.0] m/s, and uniform interior positions/goals: starts pairwise
/// clear by 0.1 m of surface gap, goals pairwise separated by the combined
/// radii plus 0.1 m. Placement draws are rejection-sampled; after 1e4
/// rejected draws for one agent the world is considered too dense and a
/// capacity error names the offending agent count.
Scenario sample_scenario(Rng& rng, int agent_count, const WorldConfig& world);

/// Deterministic in seed; scenario i is independent of n (each index gets
/// its own derived stream), so prefixes of a suite are stable.
std::vector<Scenario> generate_scenarios(int n, int agent_count,
                                         const WorldConfig& world,
                                         std::uint64_t seed);

/// t_goal minus the straight-line time ||p0 - p_goal|| / v_pref, floored at
/// -dt (discrete time can beat the continuous bound by under one step).
double extra_time(const AgentState& initial_agent, double t_goal, double dt);

/// A planner maps an episode snapshot to one command per active agent.
/// Implementations are immutable after construction and safe to call from
/// multiple threads on distinct episodes.
struct PlannedCommand {
  AgentCommand command;
  hybrid::Reason reason = hybrid::Reason::normal;  // meaningful for hybrid
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;
  virtual int dimension() const = 0;  // 0 = works in any dimension
  virtual std::vector<PlannedCommand> plan(const EpisodeState& state) const = 0;
};

std::unique_ptr<Planner> make_straight_planner();
std::unique_ptr<Planner> make_fmp_planner(const fmp::FmpConfig& cfg);
std::unique_ptr<Planner> make_policy_planner(policy::PolicyModel model);
std::unique_ptr<Planner> make_hybrid_planner(policy::PolicyModel model,
                                             const fmp::FmpConfig& fmp_cfg,
                                             const hybrid::HybridConfig& cfg);

/// By name: "straight" | "fmp" | "policy" | "hybrid"; the latter two require
/// a model.
std::unique_ptr<Planner> make_planner(
    const std::string& name, std::optional<policy::PolicyModel> model,
    const fmp::FmpConfig& fmp_cfg, const hybrid::HybridConfig& hybrid_cfg);

struct AgentResult {
  int id = 0;
  AgentOutcome outcome = AgentOutcome::stuck;
  double t_goal = 0.0;      // s; NaN unless success
  double extra_time = 0.0;  // s; NaN unless success
};

struct RunOutcome {
  std::string label;
  std::uint64_t scenario_seed = 0;
  ScenarioOutcome outcome = ScenarioOutcome::stuck;
  std::vector<AgentResult> agents;
  int steps = 0;
  double duration = 0.0;  // simulated seconds
  // Commanded agent-steps by controller mode and switch reason. Pure-FMP
  // planner steps are mode fmp / reason normal and count only into
  // steps_total.
  std::int64_t steps_total = 0;
  std::int64_t steps_policy = 0;
  std::int64_t steps_fmp_high_risk = 0;
  std::int64_t steps_fmp_simple = 0;
  std::int64_t steps_fmp_stuck = 0;
  double mean_extra_time = 0.0;  // NaN unless the scenario succeeded
  std::optional<EpisodeState> final_state;  // set when trajectories recorded
};

/// One table row. Percentages partition 100; extra time averages scenario
/// means over successful scenarios only (NaN when none). Mode fractions are
/// filled meaningfully for the hybrid planner.
struct MetricsRow {
  std::string planner;
  int agent_count = 0;
  std::string world_size;  // e.g. "8x8" or "8x8x4"
  int n_cases = 0;
  double pct_success = 0.0;
  double pct_collision = 0.0;
  double pct_stuck = 0.0;
  double mean_extra_time = 0.0;
  double frac_policy = 0.0;
  double frac_fmp_high_risk = 0.0;
  double frac_fmp_simple = 0.0;
  double frac_fmp_stuck = 0.0;
};

struct EvalOptions {
  bool safety_assertions = false;   // abort on unflagged overlap (harness bug)
  bool record_trajectories = false;
  int workers = 1;                  // scenarios in parallel; output identical
};

struct EvalResult {
  std::vector<RunOutcome> outcomes;  // scenario order
  MetricsRow metrics;
};

/// Runs every scenario to termination under eval_world (scenario worlds are
/// overridden so one suite can be replayed at different dt); dimension
/// mismatches with the planner or scenarios are rejected up front.
EvalResult evaluate(const Planner& planner, std::span<const Scenario> scenarios,
                    const WorldConfig& eval_world, const EvalOptions& options);

/// CSV with one line per row, fixed column order matching MetricsRow.
std::string metrics_csv(std::span<const MetricsRow> rows);

/// Markdown table in the same layout (planner x agent count).
std::string summary_markdown(std::span<const MetricsRow> rows);

/// JSON-lines, one RunOutcome per line.
std::string outcomes_jsonl(std::span<const RunOutcome> outcomes);

/// Static trajectory plot: one polyline per agent, start disc, goal marker,
/// collision crosses. 3D runs are drawn as top-down projections with a note.
/// Byte-deterministic for identical inputs. Empty trajectories are rejected.
std::string render_svg(const Scenario& scenario,
                       std::span<const StepRecord> trajectory);

}  // namespace swarmnav::bench
