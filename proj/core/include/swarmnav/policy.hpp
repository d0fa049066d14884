#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "swarmnav/env.hpp"
#include "swarmnav/rng.hpp"

namespace swarmnav::policy {

/// Discrete action sets. 2D has 11 entries, 3D has 43; index 0 is always
/// "straight ahead at full speed". Entries are (speed fraction of v_pref,
/// dpsi, dphi) and every entry respects the env per-step caps.
///
/// 2D layout: full speed x turns {0, +-pi/12, +-pi/6} (5), half speed x
/// {0, +-pi/6} (3), stop x {0, +-pi/6} (3).
/// 3D layout: speeds {1.0, 0.5} x the 21 (dpsi, dphi) pairs from the grid
/// {0, +-pi/12, +-pi/6}^2 minus the four (+-pi/6, +-pi/6) corners, plus one
/// stop entry: 2*21 + 1 = 43.
struct ActionSpaceEntry {
  double speed_fraction = 0.0;
  double dpsi = 0.0;
  double dphi = 0.0;
};

class ActionSpace {
 public:
  static ActionSpace for_dimension(int dimension);

  int dimension() const { return dimension_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const ActionSpaceEntry& entry(int index) const;

  /// Action realized for an agent with the given preferred speed.
  Action decode(int index, double v_pref) const;

 private:
  int dimension_ = 2;
  std::vector<ActionSpaceEntry> entries_;
};

/// Feed-forward actor-critic: two tanh hidden layers of 64 units over the
/// fixed-length observation, a softmax action head and a scalar value head.
/// Parameters live in one contiguous vector (layout per ParamLayout) so the
/// trainer can treat the model as a flat parameter vector.
struct PolicyModel {
  int dimension = 2;
  int observation_length = 0;
  int action_count = 0;
  std::vector<int> hidden = {64, 64};
  std::uint64_t init_seed = 0;
  std::map<std::string, std::string> provenance;  // free-form, round-tripped
  std::vector<double> params;

  /// Seeded fan-in-scaled uniform init. The first layer and both heads are
  /// additionally shrunk (inputs are raw meters; heads must start
  /// near-uniform / near-zero-value) — the scales are part of the contract
  /// checked by the init-distribution tests.
  static PolicyModel init(int dimension, std::uint64_t seed);

  struct Forward {
    std::vector<double> probs;
    double value = 0.0;
  };
  Forward forward(std::span<const double> obs) const;

  /// Forward pass retaining hidden activations for backprop.
  struct Cache {
    std::vector<double> h0, h1, probs;
    double value = 0.0;
  };
  Cache forward_cached(std::span<const double> obs) const;

  std::size_t param_count() const { return params.size(); }
  void validate() const;
};

/// Offsets of each weight block inside PolicyModel::params (row-major,
/// rows = outputs).
struct ParamLayout {
  int obs = 0, h0 = 0, h1 = 0, actions = 0;
  std::size_t w0 = 0, b0 = 0, w1 = 0, b1 = 0, wp = 0, bp = 0, wv = 0, bv = 0;
  std::size_t total = 0;
};
ParamLayout param_layout(int observation_length, int action_count,
                         const std::vector<int>& hidden);

/// Index drawn from the distribution using the seeded generator.
int sample_action(std::span<const double> probs, Rng& rng);

/// Argmax, ties broken by lowest index.
int greedy_action(std::span<const double> probs);

double entropy(std::span<const double> probs);

/// JSON model files; round-trip is bit-exact (shortest round-trip number
/// formatting). Shape or format mismatches fail with a model error.
void save_model(const PolicyModel& model, const std::filesystem::path& path);
PolicyModel load_model(const std::filesystem::path& path);

std::string model_to_json(const PolicyModel& model);
PolicyModel model_from_json(const std::string& text);

}  // namespace swarmnav::policy
