#include "rationlog/grpo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "rationlog/error.hpp"
#include "rationlog/rng.hpp"
#include "rationlog/text.hpp"

namespace rationlog {

void RewardGroup::validate() const {
  require(rewards.size() >= 2, "a reward group needs at least two members");
  require(epsilon > 0.0, "epsilon must be positive");
  for (double r : rewards) require(std::isfinite(r), "rewards must be finite");
}

std::vector<double> group_advantages(const RewardGroup& group) {
  group.validate();
  const double n = static_cast<double>(group.rewards.size());
  const double mean = std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / n;
  double sq = 0.0;
  bool all_equal = true;
  for (double r : group.rewards) {
    sq += (r - mean) * (r - mean);
    all_equal = all_equal && r == group.rewards.front();
  }
  std::vector<double> adv(group.rewards.size(), 0.0);
  if (all_equal) return adv;
  const double scale = std::sqrt(sq / n) + group.epsilon;
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = (group.rewards[i] - mean) / scale;
  return adv;
}

std::vector<double> centered_advantages(const RewardGroup& group) {
  group.validate();
  const double n = static_cast<double>(group.rewards.size());
  const double mean = std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / n;
  std::vector<double> adv(group.rewards.size(), 0.0);
  if (std::all_of(group.rewards.begin(), group.rewards.end(),
                  [&](double r) { return r == group.rewards.front(); }))
    return adv;
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = group.rewards[i] - mean;
  return adv;
}

double clipped_surrogate(double ratio, double advantage, double clip_eps) {
  require(ratio > 0.0, "ratio must be positive");
  require(clip_eps > 0.0 && clip_eps < 1.0, "clip_eps must lie in (0,1)");
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

constexpr std::array<std::string_view, 14> kKeywords = {
    "fatal",  "error",   "interrupt", "failed",    "panic",   "exception", "refused",
    "timeout", "normally", "info",    "corrected", "warning", "retry",     "parity"};

constexpr std::array<std::string_view, 3> kFrames[] = {
    {"The log reports", "The key parameters describe the component state.",
     "The conclusion follows from these parameters."},
    {"Key parameters are", "These values indicate the current condition of the node.",
     "The verdict is drawn from this evidence."},
    {"The message reads", "Its fields show what the subsystem did.",
     "This evidence determines the verdict."},
};

constexpr std::string_view kFiller = "detail";

std::string strip_punct(std::string token) {
  while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.back()))) token.pop_back();
  while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.front()))) token.erase(token.begin());
  return token;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::span<const std::string_view> policy_keywords() { return kKeywords; }
std::size_t policy_feature_count() { return kKeywords.size() + 1; }

std::vector<double> policy_features(std::string_view log_text) {
  std::vector<double> x(policy_feature_count(), 0.0);
  x[0] = 1.0;
  for (const auto& raw : metric_tokens(log_text)) {
    const std::string token = strip_punct(raw);
    for (std::size_t k = 0; k < kKeywords.size(); ++k)
      if (token == kKeywords[k]) x[k + 1] = 1.0;
  }
  return x;
}

MockPolicy MockPolicy::zeros(double temperature, double think_overlap) {
  return MockPolicy{std::vector<double>(policy_feature_count(), 0.0), temperature, think_overlap};
}

void MockPolicy::validate() const {
  require(theta.size() == policy_feature_count(), "theta has the wrong dimension");
  require(temperature > 0.0 && std::isfinite(temperature), "temperature must be positive");
  require(think_overlap >= 0.0 && think_overlap <= 1.0, "think_overlap must lie in [0,1]");
  for (double t : theta)
    if (!std::isfinite(t)) throw Error(ErrorKind::kNonFiniteUpdate, "theta holds a non-finite value");
}

double MockPolicy::anomaly_probability(std::string_view log_text) const {
  const auto x = policy_features(log_text);
  const double z = std::inner_product(theta.begin(), theta.end(), x.begin(), 0.0);
  return sigmoid(z / temperature);
}

std::string MockPolicy::think_text(std::string_view log_text, std::size_t variant) const {
  auto tokens = split_whitespace(log_text);
  const auto keep = static_cast<std::size_t>(std::llround(think_overlap * static_cast<double>(tokens.size())));
  for (std::size_t i = keep; i < tokens.size(); ++i) tokens[i] = std::string(kFiller);
  const auto& frame = kFrames[variant % std::size(kFrames)];
  std::string text(frame[0]);
  text += ' ';
  text += join(tokens);
  text += ". ";
  text += frame[1];
  text += ' ';
  text += frame[2];
  return text;
}

std::string MockPolicy::completion(std::string_view log_text, Label verdict, std::size_t variant) const {
  return "<think>" + think_text(log_text, variant) + "</think><answer>" +
         (is_anomalous(verdict) ? "abnormal" : "normal") + "</answer>";
}

Rollout rollout(const MockPolicy& policy, std::string_view log_text, Label truth, std::size_t group_size,
                std::uint64_t rng_seed, const RewardContext& ctx, std::uint64_t prompt_id) {
  require(group_size >= 2, "group_size must be >= 2");
  policy.validate();
  if (!ctx.scorer) throw Error(ErrorKind::kScorerUnavailable, "no perplexity scorer configured");
  Rng rng(rng_seed);
  Rollout out;
  out.group.prompt_id = prompt_id;
  out.anomaly_probability = policy.anomaly_probability(log_text);
  for (std::size_t i = 0; i < group_size; ++i) {
    const Label verdict = rng.bernoulli(out.anomaly_probability) ? Label::kAnomalous : Label::kNormal;
    out.verdicts.push_back(verdict);
    out.completions.push_back(policy.completion(log_text, verdict, i));
    out.breakdowns.push_back(
        total_reward(out.completions.back(), truth, log_text, ctx.stats, ctx.config, *ctx.scorer));
    out.group.rewards.push_back(out.breakdowns.back().total);
  }
  return out;
}

std::string_view to_string(AdvantageMode mode) {
  return mode == AdvantageMode::kMeanCentered ? "mean_centered" : "group_normalized";
}

AdvantageMode advantage_mode_from_string(std::string_view s) {
  if (s == "mean_centered") return AdvantageMode::kMeanCentered;
  if (s == "group_normalized") return AdvantageMode::kGroupNormalized;
  throw Error(ErrorKind::kInvalidConfig, "unknown advantage mode '" + std::string(s) + "'");
}

std::pair<double, double> probe_precision_recall(const MockPolicy& policy,
                                                 const std::vector<LabeledLog>& probe) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& item : probe) {
    const bool flagged = policy.anomaly_probability(item.log_text) >= 0.5;
    const bool actual = is_anomalous(item.truth);
    if (flagged && actual) ++tp;
    if (flagged && !actual) ++fp;
    if (!flagged && actual) ++fn;
  }
  const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return {precision, recall};
}

TrainResult train_mock(const MockPolicy& initial, const std::vector<LabeledLog>& dataset,
                       const RewardContext& ctx, const TrainOptions& options) {
  require(!dataset.empty(), "train_mock needs a non-empty dataset");
  require(options.steps >= 1, "steps must be >= 1");
  require(options.lr >= 0.0 && std::isfinite(options.lr), "lr must be non-negative");
  require(options.group_size >= 2, "group_size must be >= 2");
  initial.validate();

  const auto& probe = options.probe.empty() ? dataset : options.probe;
  TrainResult result{initial, {}};
  MockPolicy& policy = result.policy;
  Rng rng(options.rng_seed);

  for (std::size_t step = 1; step <= options.steps; ++step) {
    const auto prompt = static_cast<std::size_t>(rng.uniform_index(dataset.size()));
    const auto& item = dataset[prompt];
    const Rollout ro = rollout(policy, item.log_text, item.truth, options.group_size, rng.next(), ctx, prompt);
    const auto adv = options.advantage_mode == AdvantageMode::kMeanCentered ? centered_advantages(ro.group)
                                                                            : group_advantages(ro.group);

    // d/dtheta log pi(a) = (a - p) x / T for the Bernoulli head.
    const auto x = policy_features(item.log_text);
    const double p = ro.anomaly_probability;
    double coeff = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i) {
      const double a = is_anomalous(ro.verdicts[i]) ? 1.0 : 0.0;
      coeff += adv[i] * (a - p);
    }
    coeff *= options.lr / (static_cast<double>(adv.size()) * policy.temperature);
    for (std::size_t k = 0; k < x.size(); ++k) policy.theta[k] += coeff * x[k];
    for (double t : policy.theta)
      if (!std::isfinite(t))
        throw Error(ErrorKind::kNonFiniteUpdate, "theta left the finite range at step " + std::to_string(step));

    StepMetrics m;
    m.step = step;
    m.mean_reward = std::accumulate(ro.group.rewards.begin(), ro.group.rewards.end(), 0.0) /
                    static_cast<double>(ro.group.rewards.size());
    std::tie(m.probe_precision, m.probe_recall) = probe_precision_recall(policy, probe);
    result.metrics.push_back(m);
  }
  return result;
}

Json step_metrics_to_json(const StepMetrics& m) {
  return Json{{"step", m.step},
              {"mean_reward", m.mean_reward},
              {"probe_precision", m.probe_precision},
              {"probe_recall", m.probe_recall}};
}

std::vector<LabeledLog> synthetic_alignment_set(std::size_t n, std::uint64_t seed, double ambiguous_anomaly_rate) {
  static constexpr std::string_view kFailures[] = {
      "KERNEL FATAL data TLB error interrupt on node R{}",
      "ciod: Error loading program {} failed with panic",
      "machine check exception on core {} failed to recover",
  };
  static constexpr std::string_view kRoutine[] = {
      "job {} exited normally with status 0",
      "INFO ciod: generated {} core files for program",
      "instruction cache parity error corrected on core {}",
  };
  static constexpr std::string_view kAmbiguous[] = {
      "WARNING link retry on port {} after delay",
      "warning: retry {} scheduled for torus receiver",
  };
  auto fill = [](std::string_view pattern, std::uint64_t value) {
    std::string s(pattern);
    s.replace(s.find("{}"), 2, std::to_string(value));
    return s;
  };
  Rng rng(seed);
  std::vector<LabeledLog> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    const std::uint64_t value = rng.uniform_index(4096);
    if (u < 0.3) {
      out.push_back({fill(kFailures[rng.uniform_index(std::size(kFailures))], value), Label::kAnomalous});
    } else if (u < 0.6) {
      out.push_back({fill(kRoutine[rng.uniform_index(std::size(kRoutine))], value), Label::kNormal});
    } else {
      const Label truth = rng.bernoulli(ambiguous_anomaly_rate) ? Label::kAnomalous : Label::kNormal;
      out.push_back({fill(kAmbiguous[rng.uniform_index(std::size(kAmbiguous))], value), truth});
    }
  }
  return out;
}

std::vector<std::string> reference_analyses(const std::vector<LabeledLog>& dataset) {
  const MockPolicy grounded = MockPolicy::zeros(1.0, 1.0);
  std::vector<std::string> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) out.push_back(grounded.think_text(dataset[i].log_text, i));
  return out;
}

}  // namespace rationlog
