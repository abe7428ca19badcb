#include "rationlog/reward.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {

void RewardConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidConfig, what); };
  for (double v : {r_format, r_malformed, r_tp, r_tn, r_fn, r_fp, w_grounding, w_coherence, w_brevity,
                   lambda_think, brevity_sigma_factor})
    if (!std::isfinite(v)) fail("reward config values must be finite");
  if (enable_asymmetric) {
    if (!(r_tp > r_tn && r_tn > 0.0)) fail("asymmetric config needs r_tp > r_tn > 0");
    if (!(r_fn < r_fp && r_fp < 0.0)) fail("asymmetric config needs r_fn < r_fp < 0");
  } else if (r_tp != r_tn || r_fn != r_fp) {
    fail("symmetric config needs r_tp == r_tn and r_fn == r_fp");
  }
  if (w_grounding < 0.0 || w_coherence < 0.0 || w_brevity < 0.0) fail("thinking weights must be >= 0");
  if (std::abs(w_grounding + w_coherence + w_brevity - 1.0) > 1e-9) fail("thinking weights must sum to 1");
  if (lambda_think < 0.0) fail("lambda_think must be >= 0");
  if (!(brevity_sigma_factor > 0.0)) fail("brevity_sigma_factor must be > 0");
}

RewardConfig RewardConfig::without_asymmetry() const {
  RewardConfig cfg = *this;
  cfg.r_tp = r_tn;
  cfg.r_fn = r_fp;
  cfg.enable_asymmetric = false;
  return cfg;
}

RewardConfig RewardConfig::without_thinking() const {
  RewardConfig cfg = *this;
  cfg.enable_thinking = false;
  return cfg;
}

namespace {

template <typename T>
void read_field(const Json& obj, const char* key, T& field) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw Error(ErrorKind::kInvalidConfig, std::string(key) + " must be a boolean");
  } else {
    if (!it->is_number()) throw Error(ErrorKind::kInvalidConfig, std::string(key) + " must be a number");
  }
  field = it->get<T>();
}

}  // namespace

RewardConfig reward_config_from_json(const Json& obj) {
  if (!obj.is_object()) throw Error(ErrorKind::kInvalidConfig, "reward config must be an object");
  static const char* kKnown[] = {"r_format",      "r_malformed",  "r_tp",         "r_tn",
                                 "r_fn",          "r_fp",         "w_grounding",  "w_coherence",
                                 "w_brevity",     "lambda_think", "brevity_sigma_factor",
                                 "enable_asymmetric", "enable_thinking"};
  for (const auto& [key, _] : obj.items())
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown))
      throw Error(ErrorKind::kInvalidConfig, "unknown reward config key '" + key + "'");
  RewardConfig cfg;
  read_field(obj, "r_format", cfg.r_format);
  read_field(obj, "r_malformed", cfg.r_malformed);
  read_field(obj, "r_tp", cfg.r_tp);
  read_field(obj, "r_tn", cfg.r_tn);
  read_field(obj, "r_fn", cfg.r_fn);
  read_field(obj, "r_fp", cfg.r_fp);
  read_field(obj, "w_grounding", cfg.w_grounding);
  read_field(obj, "w_coherence", cfg.w_coherence);
  read_field(obj, "w_brevity", cfg.w_brevity);
  read_field(obj, "lambda_think", cfg.lambda_think);
  read_field(obj, "brevity_sigma_factor", cfg.brevity_sigma_factor);
  read_field(obj, "enable_asymmetric", cfg.enable_asymmetric);
  read_field(obj, "enable_thinking", cfg.enable_thinking);
  cfg.validate();
  return cfg;
}

Json reward_config_to_json(const RewardConfig& c) {
  return Json{{"r_format", c.r_format},
              {"r_malformed", c.r_malformed},
              {"r_tp", c.r_tp},
              {"r_tn", c.r_tn},
              {"r_fn", c.r_fn},
              {"r_fp", c.r_fp},
              {"w_grounding", c.w_grounding},
              {"w_coherence", c.w_coherence},
              {"w_brevity", c.w_brevity},
              {"lambda_think", c.lambda_think},
              {"brevity_sigma_factor", c.brevity_sigma_factor},
              {"enable_asymmetric", c.enable_asymmetric},
              {"enable_thinking", c.enable_thinking}};
}

ModelOutput parse_output(std::string_view raw) {
  ModelOutput out;
  out.raw = std::string(raw);
  const auto think_open = raw.find("<think>");
  if (think_open == std::string_view::npos) return out;
  const auto think_body = think_open + 7;
  const auto think_close = raw.find("</think>", think_body);
  if (think_close == std::string_view::npos) return out;
  out.think = std::string(raw.substr(think_body, think_close - think_body));

  const auto answer_open = raw.find("<answer>", think_close + 8);
  if (answer_open == std::string_view::npos) return out;
  const auto answer_body = answer_open + 8;
  const auto answer_close = raw.find("</answer>", answer_body);
  if (answer_close == std::string_view::npos) return out;
  out.answer = normalize_verdict(raw.substr(answer_body, answer_close - answer_body));

  out.well_formed = out.answer.has_value() && !trim(*out.think).empty();
  return out;
}

double format_reward(const ModelOutput& out, const RewardConfig& cfg) {
  return out.well_formed ? cfg.r_format : 0.0;
}

double answer_reward(Label predicted, Label truth, const RewardConfig& cfg) {
  if (is_anomalous(truth)) return is_anomalous(predicted) ? cfg.r_tp : cfg.r_fn;
  return is_anomalous(predicted) ? cfg.r_fp : cfg.r_tn;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(std::span<const std::string> tokens, std::size_t order) {
  NgramCounts counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + order)];
  return counts;
}

// Clipped matches and candidate n-gram total.
std::pair<std::size_t, std::size_t> clipped_matches(std::span<const std::string> candidate,
                                                    std::span<const std::string> reference,
                                                    std::size_t order) {
  const auto cand = ngrams(candidate, order);
  const auto ref = ngrams(reference, order);
  std::size_t matched = 0, total = 0;
  for (const auto& [gram, count] : cand) {
    total += count;
    auto it = ref.find(gram);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return {matched, total};
}

}  // namespace

double bleu2(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t order = 1; order <= 2; ++order) {
    auto [matched, total] = clipped_matches(candidate, reference, order);
    if (order == 1 && matched == 0) return 0.0;
    const double p = matched == 0 ? 1.0 / (static_cast<double>(total) + 1.0)
                                  : static_cast<double>(matched) / static_cast<double>(total);
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / 2.0);
}

double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<std::size_t> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j)
      cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[reference.size()]);
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(candidate.size());
  const double recall = lcs / static_cast<double>(reference.size());
  return 2.0 * precision * recall / (precision + recall);
}

double grounding_reward(std::string_view analysis, std::string_view log_text) {
  const auto cand = metric_tokens(analysis);
  const auto ref = metric_tokens(log_text);
  return 0.5 * bleu2(cand, ref) + 0.5 * rouge_l(cand, ref);
}

double coherence_from_perplexity(double p) {
  if (!std::isfinite(p) || p < 1.0 - 1e-9)
    throw Error(ErrorKind::kScorerUnavailable, "scorer returned invalid perplexity " + std::to_string(p));
  return 1.0 / (1.0 + std::log(std::max(p, 1.0)));
}

double coherence_reward(std::string_view analysis, const PerplexityScorer& scorer) {
  require(!trim(analysis).empty(), "coherence of empty analysis");
  return coherence_from_perplexity(scorer.perplexity(analysis));
}

double brevity_reward(std::string_view analysis, const LengthStats& stats, double sigma_factor) {
  stats.validate();
  require(sigma_factor > 0.0, "sigma_factor must be positive");
  const double length = static_cast<double>(split_whitespace(analysis).size());
  require(length > 0.0, "brevity of empty analysis");
  const double sigma = sigma_factor * stats.target_length;
  const double d = length - stats.target_length;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

RewardBreakdown compose_breakdown(double format, double answer, double grounding, double coherence,
                                  double brevity, const RewardConfig& cfg) {
  RewardBreakdown b;
  b.format = format;
  b.answer = answer;
  b.grounding = grounding;
  b.coherence = coherence;
  b.brevity = brevity;
  b.think = cfg.w_grounding * grounding + cfg.w_coherence * coherence + cfg.w_brevity * brevity;
  b.total = format + answer + cfg.lambda_think * b.think;
  return b;
}

RewardBreakdown total_reward(std::string_view raw_output, Label truth, std::string_view log_text,
                             const LengthStats& stats, const RewardConfig& cfg,
                             const PerplexityScorer& scorer) {
  const ModelOutput out = parse_output(raw_output);
  if (!out.well_formed) {
    RewardBreakdown gated;
    gated.total = cfg.r_malformed;
    return gated;
  }
  const double format = format_reward(out, cfg);
  const double answer = answer_reward(*out.answer, truth, cfg);
  if (!cfg.enable_thinking) return compose_breakdown(format, answer, 0.0, 0.0, 0.0, cfg);
  const std::string& analysis = *out.think;
  return compose_breakdown(format, answer, grounding_reward(analysis, log_text),
                           coherence_reward(analysis, scorer),
                           brevity_reward(analysis, stats, cfg.brevity_sigma_factor), cfg);
}

Json breakdown_to_json(const RewardBreakdown& b) {
  return Json{{"format", b.format},       {"answer", b.answer}, {"grounding", b.grounding},
              {"coherence", b.coherence}, {"brevity", b.brevity}, {"think", b.think},
              {"total", b.total}};
}

ScoredItem score_item(const ScoreItem& item, const RewardContext& ctx) {
  if (!ctx.scorer) throw Error(ErrorKind::kScorerUnavailable, "no perplexity scorer configured");
  ScoredItem scored;
  const ModelOutput parsed = parse_output(item.output);
  scored.well_formed = parsed.well_formed;
  if (parsed.well_formed) scored.answer = parsed.answer;
  scored.breakdown = total_reward(item.output, item.truth, item.log, ctx.stats, ctx.config, *ctx.scorer);
  return scored;
}

std::vector<ScoredItem> score_batch(const std::vector<ScoreItem>& items, const RewardContext& ctx,
                                    unsigned workers) {
  std::vector<ScoredItem> results(items.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(items.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = score_item(items[i], ctx);
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < items.size(); i += workers) results[i] = score_item(items[i], ctx);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

ScoreItem score_item_from_json(const Json& row) {
  if (!row.is_object()) throw Error(ErrorKind::kSchema, "score item must be an object");
  ScoreItem item;
  item.log = json_string(row, "log");
  item.output = json_string(row, "output");
  item.truth = label_from_string(json_string(row, "truth"));
  if (auto it = row.find("id"); it != row.end()) item.id = *it;
  return item;
}

Json scored_item_to_json(const ScoreItem& item, const ScoredItem& scored) {
  Json row = breakdown_to_json(scored.breakdown);
  row["well_formed"] = scored.well_formed;
  row["verdict"] = scored.answer ? Json(to_string(*scored.answer)) : Json(nullptr);
  if (!item.id.is_null()) row["id"] = item.id;
  return row;
}

}  // namespace rationlog
