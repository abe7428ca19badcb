#include "rationlog/perplexity.hpp"

#include <cmath>

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {
namespace {

constexpr const char* kBos = "<s>";
constexpr const char* kEos = "</s>";
constexpr const char* kUnk = "<unk>";

std::string bigram_key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

}  // namespace

BigramScorer BigramScorer::train(const std::vector<std::string>& texts, double k) {
  require(k > 0.0, "smoothing constant must be positive");
  BigramScorer model;
  model.k_ = k;
  for (const auto& text : texts) {
    auto tokens = metric_tokens(text);
    if (tokens.empty()) continue;
    tokens.push_back(kEos);
    std::string prev = kBos;
    for (const auto& w : tokens) {
      ++model.known_[w];
      model.context_counts_[prev] += 1.0;
      model.bigram_counts_[bigram_key(prev, w)] += 1.0;
      prev = w;
    }
  }
  model.vocab_size_ = model.known_.empty() ? 0 : model.known_.size() + 1;
  return model;
}

double BigramScorer::log_prob(const std::string& prev, const std::string& word) const {
  auto ctx = context_counts_.find(prev);
  auto big = bigram_counts_.find(bigram_key(prev, word));
  const double c_ctx = ctx == context_counts_.end() ? 0.0 : ctx->second;
  const double c_big = big == bigram_counts_.end() ? 0.0 : big->second;
  return std::log((c_big + k_) / (c_ctx + k_ * static_cast<double>(vocab_size_)));
}

double BigramScorer::perplexity(std::string_view text) const {
  if (!trained()) throw Error(ErrorKind::kScorerUnavailable, "bigram scorer has no training data");
  auto tokens = metric_tokens(text);
  require(!tokens.empty(), "perplexity of empty text");
  for (auto& w : tokens)
    if (!known_.count(w)) w = kUnk;
  tokens.push_back(kEos);
  double total = 0.0;
  std::string prev = kBos;
  for (const auto& w : tokens) {
    total += log_prob(prev, w);
    prev = w;
  }
  return std::exp(-total / static_cast<double>(tokens.size()));
}

}  // namespace rationlog
