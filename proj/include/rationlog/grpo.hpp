#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"
#include "rationlog/reward.hpp"

namespace rationlog {

struct RewardGroup {
  std::uint64_t prompt_id = 0;
  std::vector<double> rewards;
  double epsilon = 1e-8;

  void validate() const;
};

// (r_i - mean) / (population std + epsilon). Zero-variance groups give
// exact zeros.
std::vector<double> group_advantages(const RewardGroup& group);

// r_i - mean, without scale normalization.
std::vector<double> centered_advantages(const RewardGroup& group);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double clip_eps);

// Presence features of a fixed keyword list, preceded by a bias feature.
std::span<const std::string_view> policy_keywords();
std::size_t policy_feature_count();
std::vector<double> policy_features(std::string_view log_text);

// Logistic verdict head over keyword features: P(anomalous) =
// sigmoid(theta . x / temperature). Its think text copies the leading
// `think_overlap` fraction of the log tokens and pads with neutral filler to
// the log's length, so grounding varies while length does not.
struct MockPolicy {
  std::vector<double> theta;
  double temperature = 1.0;
  double think_overlap = 1.0;

  static MockPolicy zeros(double temperature = 1.0, double think_overlap = 1.0);
  void validate() const;
  double anomaly_probability(std::string_view log_text) const;
  std::string think_text(std::string_view log_text, std::size_t variant) const;
  std::string completion(std::string_view log_text, Label verdict, std::size_t variant) const;
};

struct Rollout {
  RewardGroup group;
  std::vector<Label> verdicts;
  std::vector<std::string> completions;
  std::vector<RewardBreakdown> breakdowns;
  double anomaly_probability = 0.0;
};

// Samples group_size verdicts from the policy's Bernoulli head (one uniform
// draw per member, think text chosen by member index) and scores each
// completion with total_reward.
Rollout rollout(const MockPolicy& policy, std::string_view log_text, Label truth, std::size_t group_size,
                std::uint64_t rng_seed, const RewardContext& ctx, std::uint64_t prompt_id = 0);

enum class AdvantageMode {
  kMeanCentered,     // r_i - mean
  kGroupNormalized,  // group_advantages
};

std::string_view to_string(AdvantageMode mode);
AdvantageMode advantage_mode_from_string(std::string_view s);

struct LabeledLog {
  std::string log_text;
  Label truth = Label::kNormal;
};

struct TrainOptions {
  std::size_t steps = 200;
  double lr = 0.5;
  std::size_t group_size = 8;
  double clip_eps = 0.2;
  std::uint64_t rng_seed = 0;
  AdvantageMode advantage_mode = AdvantageMode::kMeanCentered;
  std::vector<LabeledLog> probe;  // defaults to the training set when empty
};

struct StepMetrics {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double probe_precision = 0.0;
  double probe_recall = 0.0;
};

struct TrainResult {
  MockPolicy policy;
  std::vector<StepMetrics> metrics;
};

// Probe verdict: anomalous iff P(anomalous) >= 0.5.
std::pair<double, double> probe_precision_recall(const MockPolicy& policy, const std::vector<LabeledLog>& probe);

// Each step samples one prompt, rolls out a group, turns rewards into
// advantages and takes one on-policy step along the gradient of the clipped
// surrogate (ratio 1, so the clip is inactive and the gradient is
// A * d log pi). No KL term. Error(kNonFiniteUpdate) if theta stops being
// finite.
TrainResult train_mock(const MockPolicy& initial, const std::vector<LabeledLog>& dataset,
                       const RewardContext& ctx, const TrainOptions& options);

Json step_metrics_to_json(const StepMetrics& m);

// Keyword-driven synthetic alignment set: clear failures, clear normal
// events, and ambiguous warnings that are anomalous with probability
// `ambiguous_anomaly_rate`.
std::vector<LabeledLog> synthetic_alignment_set(std::size_t n, std::uint64_t seed,
                                                double ambiguous_anomaly_rate = 0.4);

// Reference analyses (the policy's fully grounded think text) used to fit the
// simulation's length statistics and perplexity scorer.
std::vector<std::string> reference_analyses(const std::vector<LabeledLog>& dataset);

}  // namespace rationlog
