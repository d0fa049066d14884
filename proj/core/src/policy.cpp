#include "swarmnav/policy.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"

namespace swarmnav::policy {

namespace {

constexpr double kPi12 = 0.2617993877991494;  // pi/12
constexpr double kPi6 = 0.5235987755982988;   // pi/6

}  // namespace

ActionSpace ActionSpace::for_dimension(int dimension) {
  require(dimension == 2 || dimension == 3, ErrorCategory::config,
          "action space dimension must be 2 or 3");
  ActionSpace s;
  s.dimension_ = dimension;
  if (dimension == 2) {
    for (double t : {0.0, kPi12, -kPi12, kPi6, -kPi6})
      s.entries_.push_back({1.0, t, 0.0});
    for (double t : {0.0, kPi6, -kPi6}) s.entries_.push_back({0.5, t, 0.0});
    for (double t : {0.0, kPi6, -kPi6}) s.entries_.push_back({0.0, t, 0.0});
  } else {
    const double turns[] = {0.0, kPi12, -kPi12, kPi6, -kPi6};
    for (double frac : {1.0, 0.5})
      for (double dpsi : turns)
        for (double dphi : turns) {
          if (std::abs(dpsi) == kPi6 && std::abs(dphi) == kPi6) continue;
          s.entries_.push_back({frac, dpsi, dphi});
        }
    s.entries_.push_back({0.0, 0.0, 0.0});
  }
  return s;
}

const ActionSpaceEntry& ActionSpace::entry(int index) const {
  require(index >= 0 && index < size(), ErrorCategory::config,
          "action index out of range");
  return entries_[static_cast<std::size_t>(index)];
}

Action ActionSpace::decode(int index, double v_pref) const {
  const ActionSpaceEntry& e = entry(index);
  require(std::isfinite(v_pref) && v_pref > 0.0, ErrorCategory::config,
          "decode needs v_pref > 0");
  return Action{e.speed_fraction * v_pref, e.dpsi,
                dimension_ == 3 ? e.dphi : 0.0};
}

ParamLayout param_layout(int observation_length, int action_count,
                         const std::vector<int>& hidden) {
  require(hidden.size() == 2 && hidden[0] > 0 && hidden[1] > 0,
          ErrorCategory::model, "expected two hidden layer sizes");
  ParamLayout l;
  l.obs = observation_length;
  l.h0 = hidden[0];
  l.h1 = hidden[1];
  l.actions = action_count;
  std::size_t off = 0;
  auto block = [&off](std::size_t n) {
    std::size_t at = off;
    off += n;
    return at;
  };
  l.w0 = block(static_cast<std::size_t>(l.h0) * l.obs);
  l.b0 = block(static_cast<std::size_t>(l.h0));
  l.w1 = block(static_cast<std::size_t>(l.h1) * l.h0);
  l.b1 = block(static_cast<std::size_t>(l.h1));
  l.wp = block(static_cast<std::size_t>(l.actions) * l.h1);
  l.bp = block(static_cast<std::size_t>(l.actions));
  l.wv = block(static_cast<std::size_t>(l.h1));
  l.bv = block(1);
  l.total = off;
  return l;
}

PolicyModel PolicyModel::init(int dimension, std::uint64_t seed) {
  PolicyModel m;
  m.dimension = dimension;
  m.observation_length = swarmnav::observation_length(dimension);
  m.action_count = ActionSpace::for_dimension(dimension).size();
  m.init_seed = seed;
  ParamLayout l = param_layout(m.observation_length, m.action_count, m.hidden);
  m.params.assign(l.total, 0.0);

  // Fan-in-scaled uniform, with extra shrink factors: 0.25 on the input
  // layer (observations are raw meters, up to ~8), 0.1 on both heads so the
  // initial policy is near-uniform and the initial value near zero.
  Rng rng(derive_seed(seed, 0x706F6C69ull));
  auto fill = [&](std::size_t at, std::size_t n, int fan_in, double shrink) {
    double scale = shrink / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < n; ++i)
      m.params[at + i] = rng.uniform(-scale, scale);
  };
  fill(l.w0, static_cast<std::size_t>(l.h0) * l.obs, l.obs, 0.25);
  fill(l.b0, static_cast<std::size_t>(l.h0), l.obs, 0.25);
  fill(l.w1, static_cast<std::size_t>(l.h1) * l.h0, l.h0, 1.0);
  fill(l.b1, static_cast<std::size_t>(l.h1), l.h0, 1.0);
  fill(l.wp, static_cast<std::size_t>(l.actions) * l.h1, l.h1, 0.1);
  fill(l.bp, static_cast<std::size_t>(l.actions), l.h1, 0.1);
  fill(l.wv, static_cast<std::size_t>(l.h1), l.h1, 0.1);
  fill(l.bv, 1, l.h1, 0.1);
  return m;
}

void PolicyModel::validate() const {
  require(dimension == 2 || dimension == 3, ErrorCategory::model,
          "model dimension must be 2 or 3");
  require(observation_length == swarmnav::observation_length(dimension),
          ErrorCategory::model, "model observation length mismatch");
  require(action_count == ActionSpace::for_dimension(dimension).size(),
          ErrorCategory::model, "model action count mismatch");
  ParamLayout l = param_layout(observation_length, action_count, hidden);
  require(params.size() == l.total, ErrorCategory::model,
          "model parameter count mismatch");
  for (double p : params)
    require(std::isfinite(p), ErrorCategory::model,
            "model contains non-finite parameters");
}

namespace {

void affine_tanh(const std::vector<double>& params, std::size_t w,
                 std::size_t b, int rows, int cols,
                 std::span<const double> in, std::vector<double>& out,
                 bool with_tanh) {
  out.resize(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double acc = params[b + static_cast<std::size_t>(r)];
    const double* wr = params.data() + w + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += wr[c] * in[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = with_tanh ? std::tanh(acc) : acc;
  }
}

void softmax_in_place(std::vector<double>& scores) {
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace

PolicyModel::Cache PolicyModel::forward_cached(
    std::span<const double> obs) const {
  require(static_cast<int>(obs.size()) == observation_length,
          ErrorCategory::model, "observation length mismatch");
  ParamLayout l = param_layout(observation_length, action_count, hidden);
  Cache c;
  affine_tanh(params, l.w0, l.b0, l.h0, l.obs, obs, c.h0, true);
  affine_tanh(params, l.w1, l.b1, l.h1, l.h0, c.h0, c.h1, true);
  affine_tanh(params, l.wp, l.bp, l.actions, l.h1, c.h1, c.probs, false);
  softmax_in_place(c.probs);
  std::vector<double> v;
  affine_tanh(params, l.wv, l.bv, 1, l.h1, c.h1, v, false);
  c.value = v[0];
  for (double p : c.probs)
    require(std::isfinite(p), ErrorCategory::model,
            "non-finite policy output (corrupt model)");
  require(std::isfinite(c.value), ErrorCategory::model,
          "non-finite value output (corrupt model)");
  return c;
}

PolicyModel::Forward PolicyModel::forward(std::span<const double> obs) const {
  Cache c = forward_cached(obs);
  return Forward{std::move(c.probs), c.value};
}

int sample_action(std::span<const double> probs, Rng& rng) {
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, ErrorCategory::config,
            "invalid probability vector");
    sum += p;
  }
  require(sum > 0.0, ErrorCategory::config, "probability vector sums to 0");
  double u = rng.uniform() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);  // u landed on the rounding tail
}

int greedy_action(std::span<const double> probs) {
  require(!probs.empty(), ErrorCategory::config, "empty probability vector");
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    require(std::isfinite(probs[i]), ErrorCategory::config,
            "invalid probability vector");
    if (probs[i] > probs[static_cast<std::size_t>(best)])
      best = static_cast<int>(i);
  }
  return best;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

namespace {

constexpr const char* kModelFormat = "swarmnav-policy/1";
constexpr const char* kObsVersion = "swarmnav-obs/1";

}  // namespace

std::string model_to_json(const PolicyModel& model) {
  model.validate();
  detail::json j;
  j["format"] = kModelFormat;
  j["dimension"] = model.dimension;
  j["observation_version"] = kObsVersion;
  j["observation_length"] = model.observation_length;
  j["action_count"] = model.action_count;
  j["hidden"] = model.hidden;
  j["init_seed"] = model.init_seed;
  detail::json prov = detail::json::object();
  for (const auto& [k, v] : model.provenance) prov[k] = v;
  j["provenance"] = prov;
  j["params"] = model.params;
  return j.dump() + "\n";
}

// Shared JSON helpers report schema problems as config errors; inside a
// model file they are model errors (the CLI maps the category to a distinct
// exit code), so rewrap.
static PolicyModel model_from_json_impl(const std::string& text);

PolicyModel model_from_json(const std::string& text) {
  try {
    return model_from_json_impl(text);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::config) throw;
    std::string msg = e.what();
    const std::string prefix = "config: ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    fail(ErrorCategory::model, msg);
  }
}

static PolicyModel model_from_json_impl(const std::string& text) {
  detail::json j = detail::parse_json(text, "model");
  if (!j.is_object()) fail(ErrorCategory::model, "model file is not an object");
  detail::check_known_keys(
      j,
      {"format", "dimension", "observation_version", "observation_length",
       "action_count", "hidden", "init_seed", "provenance", "params"},
      "model");
  auto str = [&](const char* k) {
    return detail::require_key(j, k, "model").get<std::string>();
  };
  if (str("format") != kModelFormat)
    fail(ErrorCategory::model, "unsupported model format \"" + str("format") +
                                   "\" (want " + kModelFormat + ")");
  if (str("observation_version") != kObsVersion)
    fail(ErrorCategory::model,
         "model observation layout \"" + str("observation_version") +
             "\" incompatible with " + kObsVersion);
  PolicyModel m;
  m.dimension = detail::require_key(j, "dimension", "model").get<int>();
  m.observation_length =
      detail::require_key(j, "observation_length", "model").get<int>();
  m.action_count = detail::require_key(j, "action_count", "model").get<int>();
  m.hidden =
      detail::require_key(j, "hidden", "model").get<std::vector<int>>();
  m.init_seed =
      detail::require_key(j, "init_seed", "model").get<std::uint64_t>();
  const detail::json& prov = detail::require_key(j, "provenance", "model");
  for (const auto& [k, v] : prov.items())
    m.provenance[k] = v.get<std::string>();
  const detail::json& params = detail::require_key(j, "params", "model");
  if (!params.is_array())
    fail(ErrorCategory::model, "model params must be an array");
  m.params.reserve(params.size());
  for (const auto& p : params) {
    if (!p.is_number())
      fail(ErrorCategory::model, "model params must all be numbers");
    m.params.push_back(p.get<double>());
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorCategory::model, std::string("model file invalid: ") + e.what());
  }
  return m;
}

void save_model(const PolicyModel& model, const std::filesystem::path& path) {
  detail::write_text_file(path, model_to_json(model));
}

PolicyModel load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_text_file(path));
}

}  // namespace swarmnav::policy
