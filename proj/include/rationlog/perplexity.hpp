#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rationlog {

// Read-only after construction; implementations must tolerate concurrent
// perplexity() calls. Failures are reported as Error(kScorerUnavailable).
class PerplexityScorer {
 public:
  virtual ~PerplexityScorer() = default;
  virtual double perplexity(std::string_view text) const = 0;
};

// Word-bigram language model with add-k smoothing over lowercased whitespace
// tokens. Sentences are framed by <s> ... </s>; unseen words share one <unk>
// vocabulary slot, so every conditional distribution sums to one.
class BigramScorer final : public PerplexityScorer {
 public:
  static constexpr double kDefaultK = 0.1;

  BigramScorer() = default;
  static BigramScorer train(const std::vector<std::string>& texts, double k = kDefaultK);

  bool trained() const { return vocab_size_ > 0; }
  std::size_t vocab_size() const { return vocab_size_; }
  double perplexity(std::string_view text) const override;

 private:
  double log_prob(const std::string& prev, const std::string& word) const;

  double k_ = kDefaultK;
  std::size_t vocab_size_ = 0;  // distinct words incl. </s>, plus <unk>
  std::unordered_map<std::string, std::size_t> known_;
  std::unordered_map<std::string, double> context_counts_;
  std::unordered_map<std::string, double> bigram_counts_;
};

}  // namespace rationlog
