#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"
#include "rationlog/length_stats.hpp"
#include "rationlog/perplexity.hpp"

namespace rationlog {

struct ModelOutput {
  std::string raw;
  std::optional<std::string> think;
  std::optional<Label> answer;
  bool well_formed = false;
};

struct RewardConfig {
  double r_format = 0.5;
  double r_malformed = -1.0;
  double r_tp = 2.0;
  double r_tn = 1.0;
  double r_fn = -2.0;
  double r_fp = -1.0;
  double w_grounding = 0.4;
  double w_coherence = 0.3;
  double w_brevity = 0.3;
  double lambda_think = 0.5;
  double brevity_sigma_factor = 0.5;
  bool enable_asymmetric = true;
  bool enable_thinking = true;

  // Asymmetric: r_tp > r_tn > 0 and r_fn < r_fp < 0. Symmetric: r_tp == r_tn
  // and r_fn == r_fp. Weights non-negative summing to 1 within 1e-9.
  // Throws Error(kInvalidConfig).
  void validate() const;

  // "Without AC": correct answers earn r_tn, wrong answers cost r_fp.
  RewardConfig without_asymmetry() const;
  // "Without TE": the thinking term is dropped.
  RewardConfig without_thinking() const;
};

// Unknown keys are rejected; missing keys keep their defaults. Validates.
RewardConfig reward_config_from_json(const Json& obj);
Json reward_config_to_json(const RewardConfig& cfg);

struct RewardBreakdown {
  double format = 0.0;
  double answer = 0.0;
  double grounding = 0.0;
  double coherence = 0.0;
  double brevity = 0.0;
  double think = 0.0;
  double total = 0.0;

  bool operator==(const RewardBreakdown&) const = default;
};

// First <think>..</think>, then the first <answer>..</answer> after it. Both
// bodies must be non-blank and the answer must normalize to a Label.
ModelOutput parse_output(std::string_view raw);

double format_reward(const ModelOutput& out, const RewardConfig& cfg);
double answer_reward(Label predicted, Label truth, const RewardConfig& cfg);

// BLEU with orders 1 and 2: geometric mean of clipped n-gram precisions,
// add-one smoothing only for an order with zero matches, times the brevity
// penalty exp(1 - |ref|/|cand|) when the candidate is shorter. 0 for an empty
// candidate or when no unigram matches.
double bleu2(std::span<const std::string> candidate, std::span<const std::string> reference);

// LCS-based F1.
double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

// Mean of bleu2 and rouge_l between the analysis and the log line.
double grounding_reward(std::string_view analysis, std::string_view log_text);

// 1 / (1 + ln p) for the scorer's perplexity p >= 1.
double coherence_reward(std::string_view analysis, const PerplexityScorer& scorer);
double coherence_from_perplexity(double perplexity);

// Gaussian in the token count around the target length, sigma = factor * target.
double brevity_reward(std::string_view analysis, const LengthStats& stats, double sigma_factor);

// total = format + answer + lambda_think * think, think being the weighted
// sum of the three thinking components.
RewardBreakdown compose_breakdown(double format, double answer, double grounding, double coherence,
                                  double brevity, const RewardConfig& cfg);

// The full gated reward. Malformed output earns exactly r_malformed with all
// components zero. With enable_thinking off the thinking components are not
// evaluated and stay zero, so the scorer is never consulted.
RewardBreakdown total_reward(std::string_view raw_output, Label truth, std::string_view log_text,
                             const LengthStats& stats, const RewardConfig& cfg,
                             const PerplexityScorer& scorer);

Json breakdown_to_json(const RewardBreakdown& b);

// Everything total_reward needs besides the per-item inputs.
struct RewardContext {
  RewardConfig config;
  LengthStats stats;
  std::shared_ptr<const PerplexityScorer> scorer;
};

struct ScoreItem {
  std::string log;
  std::string output;
  Label truth = Label::kNormal;
  Json id;  // echoed verbatim when present
};

struct ScoredItem {
  RewardBreakdown breakdown;
  bool well_formed = false;
  std::optional<Label> answer;
};

ScoredItem score_item(const ScoreItem& item, const RewardContext& ctx);

// Results keep input order regardless of the worker count.
std::vector<ScoredItem> score_batch(const std::vector<ScoreItem>& items, const RewardContext& ctx,
                                    unsigned workers = 1);

ScoreItem score_item_from_json(const Json& row);
Json scored_item_to_json(const ScoreItem& item, const ScoredItem& scored);

}  // namespace rationlog
