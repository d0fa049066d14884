#include "swarmnav/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "swarmnav/bench.hpp"
#include "swarmnav/env.hpp"

namespace swarmnav::trainer {

TrainConfig TrainConfig::defaults(int dimension) {
  TrainConfig c;
  c.world = dimension == 3 ? WorldConfig::default_3d()
                           : WorldConfig::default_2d();
  c.world.dt = 0.2;  // coarse step for training; testing runs finer
  return c;
}

void TrainConfig::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0,
          ErrorCategory::config, "gamma must lie in (0, 1)");
  require(std::isfinite(beta) && beta >= 0.0, ErrorCategory::config,
          "entropy weight must be >= 0");
  require(n_step >= 1, ErrorCategory::config, "n_step must be >= 1");
  require(std::isfinite(learning_rate) && learning_rate >= 0.0,
          ErrorCategory::config, "learning rate must be >= 0");
  require(parallel_envs >= 1, ErrorCategory::config,
          "parallel_envs must be >= 1");
  require(!stages.empty(), ErrorCategory::config,
          "training needs at least one stage");
  int prev = 0;
  for (const auto& s : stages) {
    require(s.agent_count >= 1, ErrorCategory::config,
            "stage agent count must be >= 1");
    require(s.agent_count > prev, ErrorCategory::config,
            "stage agent counts must be strictly increasing");
    require(s.episode_budget >= 1, ErrorCategory::config,
            "stage episode budget must be >= 1");
    prev = s.agent_count;
  }
  world.validate();
  reward.validate();
}

std::vector<double> discounted_returns(std::span<const double> rewards,
                                       double bootstrap, double gamma) {
  require(!rewards.empty(), ErrorCategory::config,
          "discounted_returns needs at least one reward");
  require(std::isfinite(bootstrap), ErrorCategory::config,
          "bootstrap value must be finite");
  std::vector<double> out(rewards.size());
  double acc = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    require(std::isfinite(rewards[i]), ErrorCategory::config,
            "rewards must be finite");
    acc = rewards[i] + gamma * acc;
    out[i] = acc;
  }
  return out;
}

std::vector<double> compute_advantages(const policy::PolicyModel& model,
                                       std::span<const Sample> batch) {
  std::vector<double> adv;
  adv.reserve(batch.size());
  for (const auto& s : batch)
    adv.push_back(s.ret - model.forward(s.obs).value);
  return adv;
}

double loss_with_frozen_advantage(const policy::PolicyModel& model,
                                  std::span<const Sample> batch,
                                  std::span<const double> advantages,
                                  double beta) {
  require(batch.size() == advantages.size(), ErrorCategory::config,
          "one advantage per sample required");
  require(!batch.empty(), ErrorCategory::config, "empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Sample& s = batch[i];
    policy::PolicyModel::Forward f = model.forward(s.obs);
    double value_err = s.ret - f.value;
    double h = policy::entropy(f.probs);
    double logp = std::log(f.probs[static_cast<std::size_t>(s.action)]);
    total += value_err * value_err - (logp * advantages[i] + beta * h);
  }
  return total / static_cast<double>(batch.size());
}

LossStats loss_and_gradient(const policy::PolicyModel& model,
                            std::span<const Sample> batch, double beta,
                            std::vector<double>& grad) {
  require(!batch.empty(), ErrorCategory::config, "empty batch");
  require(grad.size() == model.param_count(), ErrorCategory::config,
          "gradient buffer size mismatch");
  policy::ParamLayout l = policy::param_layout(
      model.observation_length, model.action_count, model.hidden);
  const double inv = 1.0 / static_cast<double>(batch.size());
  const std::vector<double>& p = model.params;

  LossStats stats;
  stats.samples = batch.size();
  std::vector<double> gs(static_cast<std::size_t>(l.actions));
  std::vector<double> gh1(static_cast<std::size_t>(l.h1));
  std::vector<double> gh0(static_cast<std::size_t>(l.h0));

  for (const Sample& s : batch) {
    require(static_cast<int>(s.obs.size()) == model.observation_length,
            ErrorCategory::config, "sample observation length mismatch");
    require(s.action >= 0 && s.action < l.actions, ErrorCategory::config,
            "sample action index out of range");
    policy::PolicyModel::Cache c = model.forward_cached(s.obs);
    double A = s.ret - c.value;
    double H = policy::entropy(c.probs);
    double logp = std::log(c.probs[static_cast<std::size_t>(s.action)]);
    stats.value_loss += A * A;
    stats.policy_objective += logp * A + beta * H;
    stats.entropy += H;

    // d/dscore_j of (value term - policy term); advantage A is a constant
    // in the policy term by construction.
    for (int j = 0; j < l.actions; ++j) {
      double pj = c.probs[static_cast<std::size_t>(j)];
      double d_logp = (j == s.action ? 1.0 : 0.0) - pj;
      double d_entropy = -pj * (std::log(pj) + H);
      gs[static_cast<std::size_t>(j)] =
          inv * (-(A * d_logp) - beta * d_entropy);
    }
    double gv = inv * (-2.0 * A);

    // Heads into grad; accumulate hidden-layer gradient.
    std::fill(gh1.begin(), gh1.end(), 0.0);
    for (int j = 0; j < l.actions; ++j) {
      double g = gs[static_cast<std::size_t>(j)];
      const double* wr = p.data() + l.wp + static_cast<std::size_t>(j) * l.h1;
      double* gwr = grad.data() + l.wp + static_cast<std::size_t>(j) * l.h1;
      for (int k = 0; k < l.h1; ++k) {
        gwr[k] += g * c.h1[static_cast<std::size_t>(k)];
        gh1[static_cast<std::size_t>(k)] += g * wr[k];
      }
      grad[l.bp + static_cast<std::size_t>(j)] += g;
    }
    {
      const double* wv = p.data() + l.wv;
      double* gwv = grad.data() + l.wv;
      for (int k = 0; k < l.h1; ++k) {
        gwv[k] += gv * c.h1[static_cast<std::size_t>(k)];
        gh1[static_cast<std::size_t>(k)] += gv * wv[k];
      }
      grad[l.bv] += gv;
    }

    // Backprop through tanh layers.
    std::fill(gh0.begin(), gh0.end(), 0.0);
    for (int r = 0; r < l.h1; ++r) {
      double hr = c.h1[static_cast<std::size_t>(r)];
      double gz = gh1[static_cast<std::size_t>(r)] * (1.0 - hr * hr);
      const double* wr = p.data() + l.w1 + static_cast<std::size_t>(r) * l.h0;
      double* gwr = grad.data() + l.w1 + static_cast<std::size_t>(r) * l.h0;
      for (int cix = 0; cix < l.h0; ++cix) {
        gwr[cix] += gz * c.h0[static_cast<std::size_t>(cix)];
        gh0[static_cast<std::size_t>(cix)] += gz * wr[cix];
      }
      grad[l.b1 + static_cast<std::size_t>(r)] += gz;
    }
    for (int r = 0; r < l.h0; ++r) {
      double hr = c.h0[static_cast<std::size_t>(r)];
      double gz = gh0[static_cast<std::size_t>(r)] * (1.0 - hr * hr);
      double* gwr = grad.data() + l.w0 + static_cast<std::size_t>(r) * l.obs;
      for (int cix = 0; cix < l.obs; ++cix)
        gwr[cix] += gz * s.obs[static_cast<std::size_t>(cix)];
      grad[l.b0 + static_cast<std::size_t>(r)] += gz;
    }
  }

  double n = static_cast<double>(batch.size());
  stats.value_loss /= n;
  stats.policy_objective /= n;
  stats.entropy /= n;
  return stats;
}

AdamOptimizer::AdamOptimizer(std::size_t param_count, double learning_rate,
                             double beta1, double beta2, double eps)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(eps),
      m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params,
                         const std::vector<double>& grad) {
  require(params.size() == m_.size() && grad.size() == m_.size(),
          ErrorCategory::config, "optimizer size mismatch");
  t_ += 1;
  double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
    double mhat = m_[i] / c1;
    double vhat = v_[i] / c2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

namespace {

struct Segment {
  std::vector<std::vector<double>> obs;
  std::vector<int> actions;
  std::vector<double> rewards;
  bool empty() const { return rewards.empty(); }
  void clear() {
    obs.clear();
    actions.clear();
    rewards.clear();
  }
};

struct FinishedEpisode {
  double mean_reward = 0.0;
};

struct Worker {
  Rng rng;
  EpisodeState env;
  std::vector<Segment> segments;       // per agent index
  std::vector<double> episode_reward;  // per agent
  std::vector<double> goal_term_sum;   // per agent, NSL online telescope
  std::vector<double> goal_dist_start; // per agent
  std::vector<bool> reached;           // per agent
  std::vector<FinishedEpisode> finished;

  explicit Worker(std::uint64_t seed) : rng(seed), env() {}
};

void reset_worker(Worker& w, const TrainConfig& config,
                  const StageConfig& stage) {
  Scenario sc = bench::sample_scenario(w.rng, stage.agent_count, config.world);
  w.env = EpisodeState::start(sc, /*record_trajectory=*/false);
  std::size_t n = w.env.agents.size();
  w.segments.assign(n, Segment{});
  w.episode_reward.assign(n, 0.0);
  w.goal_term_sum.assign(n, 0.0);
  w.goal_dist_start.assign(n, 0.0);
  w.reached.assign(n, false);
  for (std::size_t i = 0; i < n; ++i)
    w.goal_dist_start[i] = w.env.agents[i].goal_distance();
}

void flush_segment(Segment& seg, double bootstrap, double gamma,
                   std::vector<Sample>& batch) {
  if (seg.empty()) return;
  std::vector<double> rets = discounted_returns(seg.rewards, bootstrap, gamma);
  for (std::size_t i = 0; i < rets.size(); ++i)
    batch.push_back(
        Sample{std::move(seg.obs[i]), seg.actions[i], rets[i]});
  seg.clear();
}

// Telescoping check of the shaped goal term: over an episode in which the
// agent never reaches its goal, the summed progress rewards must equal
// alpha * (initial - final goal distance). Violations mean the harness is
// mis-wiring rewards, not a property of training, so they abort.
void check_episode_invariants(const Worker& w, const TrainConfig& config) {
  if (config.reward.variant != reward::Variant::nsl) return;
  for (std::size_t i = 0; i < w.env.agents.size(); ++i) {
    if (w.reached[i]) continue;
    double expect =
        config.reward.alpha *
        (w.goal_dist_start[i] - w.env.agents[i].goal_distance());
    double got = w.goal_term_sum[i];
    require(std::abs(got - expect) <=
                1e-9 * std::max(1.0, std::abs(expect)) + 1e-9,
            ErrorCategory::internal,
            "shaped-reward telescope violated during training");
  }
}

void finish_episode(Worker& w, const TrainConfig& config) {
  check_episode_invariants(w, config);
  double sum = 0.0;
  for (double r : w.episode_reward) sum += r;
  w.finished.push_back(FinishedEpisode{
      sum / static_cast<double>(w.episode_reward.size())});
}

// Advances one worker by n_step environment steps, appending samples and
// finished-episode events. Uses the shared read-only model snapshot.
void rollout(Worker& w, const policy::PolicyModel& model,
             const policy::ActionSpace& space, const TrainConfig& config,
             const StageConfig& stage, std::vector<Sample>& batch) {
  for (int s = 0; s < config.n_step; ++s) {
    TerminationReport term = episode_terminated(w.env);
    if (term.done) {
      // Truncation at the horizon: surviving agents bootstrap their value.
      for (std::size_t i = 0; i < w.env.agents.size(); ++i) {
        if (w.env.agents[i].status == AgentStatus::active &&
            !w.segments[i].empty()) {
          double v =
              model.forward(observe(w.env, w.env.agents[i].id)).value;
          flush_segment(w.segments[i], v, config.gamma, batch);
        } else {
          flush_segment(w.segments[i], 0.0, config.gamma, batch);
        }
      }
      finish_episode(w, config);
      reset_worker(w, config, stage);
      continue;
    }

    std::vector<AgentCommand> cmds;
    std::vector<int> acted(w.env.agents.size(), -1);
    std::vector<std::vector<double>> pending_obs(w.env.agents.size());
    for (std::size_t i = 0; i < w.env.agents.size(); ++i) {
      const AgentState& a = w.env.agents[i];
      if (a.status != AgentStatus::active) continue;
      std::vector<double> obs = observe(w.env, a.id);
      policy::PolicyModel::Forward f = model.forward(obs);
      int action = policy::sample_action(f.probs, w.rng);
      cmds.push_back(AgentCommand{a.id, space.decode(action, a.preferred_speed),
                                  ControllerMode::policy});
      acted[i] = action;
      pending_obs[i] = std::move(obs);
    }

    StepEffects eff = step(w.env, cmds);
    for (std::size_t i = 0; i < w.env.agents.size(); ++i) {
      if (acted[i] < 0) continue;
      const AgentStepEffect& e = eff.agents[i];
      double r = step_reward(config.reward, e.newly_arrived,
                             e.goal_dist_before, e.goal_dist_after,
                             e.min_surface_after);
      if (config.reward.variant == reward::Variant::nsl) {
        double rc = reward::nsl_collision_term(e.min_surface_after);
        require(rc >= -1.0 - 1e-12 && rc <= 0.0, ErrorCategory::internal,
                "collision term out of range");
        if (!e.newly_arrived) w.goal_term_sum[i] += r - rc;
      }
      if (e.newly_arrived) w.reached[i] = true;
      w.episode_reward[i] += r;
      Segment& seg = w.segments[i];
      seg.obs.push_back(std::move(pending_obs[i]));
      seg.actions.push_back(acted[i]);
      seg.rewards.push_back(r);
      if (e.newly_arrived || e.newly_collided)
        flush_segment(seg, 0.0, config.gamma, batch);
    }
  }

  // Segment boundary at the iteration edge: bootstrap still-active agents.
  for (std::size_t i = 0; i < w.env.agents.size(); ++i) {
    if (w.segments[i].empty()) continue;
    double v = 0.0;
    if (w.env.agents[i].status == AgentStatus::active)
      v = model.forward(observe(w.env, w.env.agents[i].id)).value;
    flush_segment(w.segments[i], v, config.gamma, batch);
  }
}

bool params_finite(const std::vector<double>& p) {
  for (double x : p)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

StageResult train_stage(const TrainConfig& config,
                        const policy::PolicyModel& start,
                        const StageConfig& stage, int stage_index) {
  config.validate();
  start.validate();
  require(start.dimension == config.world.dimension, ErrorCategory::model,
          "model dimension does not match the training world");

  policy::ActionSpace space =
      policy::ActionSpace::for_dimension(config.world.dimension);
  StageResult result;
  result.model = start;

  AdamOptimizer opt(result.model.param_count(), config.learning_rate);
  std::vector<Worker> workers;
  workers.reserve(static_cast<std::size_t>(config.parallel_envs));
  for (int wix = 0; wix < config.parallel_envs; ++wix) {
    workers.emplace_back(derive_seed(config.seed, 0x524F4C4Cull,
                                     static_cast<std::uint64_t>(stage_index),
                                     static_cast<std::uint64_t>(wix)));
    reset_worker(workers.back(), config, stage);
  }

  const int window =
      std::min(1000, std::max(1, stage.episode_budget / 10));
  std::deque<double> recent;
  double recent_sum = 0.0;
  int episodes_done = 0;
  std::vector<Sample> batch;
  std::vector<double> grad(result.model.param_count(), 0.0);
  std::vector<double> last_good = result.model.params;

  while (episodes_done < stage.episode_budget) {
    batch.clear();
    for (Worker& w : workers)
      rollout(w, result.model, space, config, stage, batch);

    // Merge finished-episode events in worker order.
    for (Worker& w : workers) {
      for (const FinishedEpisode& fe : w.finished) {
        if (episodes_done >= stage.episode_budget) break;
        episodes_done += 1;
        recent.push_back(fe.mean_reward);
        recent_sum += fe.mean_reward;
        if (static_cast<int>(recent.size()) > window) {
          recent_sum -= recent.front();
          recent.pop_front();
        }
        result.curve.push_back(EpisodePoint{
            episodes_done, stage_index, stage.agent_count, fe.mean_reward,
            recent_sum / static_cast<double>(recent.size())});
      }
      w.finished.clear();
    }

    if (batch.empty()) continue;
    std::fill(grad.begin(), grad.end(), 0.0);
    loss_and_gradient(result.model, batch, config.beta, grad);
    opt.step(result.model.params, grad);
    if (!params_finite(result.model.params)) {
      result.model.params = last_good;
      result.diverged = true;
      result.note = "parameters diverged after " +
                    std::to_string(episodes_done) +
                    " episodes; restored last finite state";
      break;
    }
    last_good = result.model.params;
  }
  return result;
}

CurriculumResult train_curriculum(const TrainConfig& config) {
  config.validate();
  const int dim = config.world.dimension;
  policy::PolicyModel model =
      policy::PolicyModel::init(dim, derive_seed(config.seed, 0x494E4954ull));

  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  model.provenance["gamma"] = fmt(config.gamma);
  model.provenance["beta"] = fmt(config.beta);
  model.provenance["n_step"] = std::to_string(config.n_step);
  model.provenance["learning_rate"] = fmt(config.learning_rate);
  model.provenance["parallel_envs"] = std::to_string(config.parallel_envs);
  model.provenance["seed"] = std::to_string(config.seed);
  model.provenance["reward_variant"] = reward::to_string(config.reward.variant);
  model.provenance["reward_alpha"] = fmt(config.reward.alpha);
  model.provenance["train_dt"] = fmt(config.world.dt);

  CurriculumResult result;
  int episode_offset = 0;
  for (std::size_t si = 0; si < config.stages.size(); ++si) {
    StageResult sr =
        train_stage(config, model, config.stages[si], static_cast<int>(si));
    model = sr.model;
    model.provenance["stages_completed"] = std::to_string(si + 1);
    result.stage_checkpoints.push_back(model);
    for (EpisodePoint p : sr.curve) {
      p.episode += episode_offset;
      result.curve.push_back(p);
    }
    episode_offset += static_cast<int>(sr.curve.size());
    if (sr.diverged) {
      result.diverged = true;
      result.note = "stage " + std::to_string(si) + ": " + sr.note;
      break;
    }
  }
  result.model = model;
  return result;
}

std::string curve_csv(std::span<const EpisodePoint> curve) {
  std::string out = "episode,stage,agent_count,reward,rolling_reward\n";
  char line[160];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%d,%d,%d,%.17g,%.17g\n", p.episode,
                  p.stage, p.agent_count, p.reward, p.rolling);
    out += line;
  }
  return out;
}

}  // namespace swarmnav::trainer
