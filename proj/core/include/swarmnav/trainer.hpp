#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarmnav/policy.hpp"
#include "swarmnav/reward.hpp"

namespace swarmnav::trainer {

/// Synchronous advantage actor-critic. Logical rollout workers advance
/// independent environments for n_step steps between shared parameter
/// updates; every randomness source is a per-worker stream derived from the
/// root seed, and batches are merged in worker order, so training is
/// bit-reproducible for a fixed config regardless of scheduling.

struct StageConfig {
  int agent_count = 2;
  int episode_budget = 20000;  // scenarios, not per-agent samples
};

struct TrainConfig {
  double gamma = 0.97;          // discount
  double beta = 1e-4;           // entropy bonus weight
  int n_step = 8;               // bootstrap horizon
  double learning_rate = 3e-4;
  int parallel_envs = 8;        // logical rollout workers
  std::vector<StageConfig> stages = {{2, 20000}, {4, 20000}};
  std::uint64_t seed = 1;
  reward::RewardConfig reward = reward::RewardConfig::nsl_defaults();
  WorldConfig world;  // training worlds usually run coarser dt than testing

  static TrainConfig defaults(int dimension);
  void validate() const;
};

/// One learning sample after return computation.
struct Sample {
  std::vector<double> obs;
  int action = 0;
  double ret = 0.0;  // n-step discounted return with bootstrap
};

/// n-step returns computed backward: R_i = r_i + gamma * R_{i+1}, seeded
/// with the bootstrap value behind the last reward. Terminal segments pass
/// bootstrap 0.
std::vector<double> discounted_returns(std::span<const double> rewards,
                                       double bootstrap, double gamma);

struct LossStats {
  double value_loss = 0.0;        // mean (R - V)^2
  double policy_objective = 0.0;  // mean log pi(a|s) * A + beta * H
  double entropy = 0.0;           // mean H(pi)
  std::size_t samples = 0;
};

/// Advantages A = R - V under the given model, in batch order.
std::vector<double> compute_advantages(const policy::PolicyModel& model,
                                       std::span<const Sample> batch);

/// Training objective value with the advantages pinned to the supplied
/// constants: mean over the batch of (R - V)^2 - (log pi(a|s) * A + beta*H).
/// This is the exact function whose gradient loss_and_gradient produces
/// (the advantage carries no gradient in the policy term), which makes it
/// the reference for finite-difference checks.
double loss_with_frozen_advantage(const policy::PolicyModel& model,
                                  std::span<const Sample> batch,
                                  std::span<const double> advantages,
                                  double beta);

/// Accumulates d/dtheta of the objective above (advantages taken from the
/// current model) into grad, which must be zero-initialized to param_count.
LossStats loss_and_gradient(const policy::PolicyModel& model,
                            std::span<const Sample> batch, double beta,
                            std::vector<double>& grad);

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t param_count, double learning_rate,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  double lr_, b1_, b2_, eps_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct EpisodePoint {
  int episode = 0;      // 1-based, global across a curriculum
  int stage = 0;        // stage index, 0-based
  int agent_count = 0;
  double reward = 0.0;  // episode reward averaged over agents
  double rolling = 0.0; // rolling mean, window min(1000, budget/10)
};

struct StageResult {
  policy::PolicyModel model;
  std::vector<EpisodePoint> curve;
  bool diverged = false;  // stopped early, model is the last finite state
  std::string note;
};

/// Runs one stage from the given starting parameters.
StageResult train_stage(const TrainConfig& config,
                        const policy::PolicyModel& start,
                        const StageConfig& stage, int stage_index);

struct CurriculumResult {
  policy::PolicyModel model;
  std::vector<policy::PolicyModel> stage_checkpoints;  // one per stage
  std::vector<EpisodePoint> curve;  // stages concatenated, episodes global
  bool diverged = false;
  std::string note;
};

/// Chains the configured stages, warm-starting each from the previous
/// checkpoint. The starting model is freshly initialized from config.seed.
CurriculumResult train_curriculum(const TrainConfig& config);

/// CSV with header episode,stage,agent_count,reward,rolling_reward.
std::string curve_csv(std::span<const EpisodePoint> curve);

}  // namespace swarmnav::trainer
