#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "rationlog/jsonl.hpp"
#include "rationlog/length_stats.hpp"
#include "rationlog/perplexity.hpp"
#include "rationlog/reward.hpp"

namespace httplib {
class Server;
}

namespace rationlog {

inline constexpr const char* kDefaultConfigId = "default";

// Immutable scoring state shared by the CLI and the HTTP service.
struct ScoringSetup {
  std::map<std::string, RewardConfig> configs;  // always holds "default"
  LengthStats stats;
  std::shared_ptr<const PerplexityScorer> scorer;

  RewardContext context(const std::string& config_id = kDefaultConfigId) const;
};

// Config file layout:
//   {
//     "reward":  { RewardConfig fields },           // the "default" config
//     "configs": { "<id>": { RewardConfig fields } },
//     "stats":   { "target_length": .., "std_dev": .., "n": .. },
//     "stats_path": "stats.json",
//     "scorer_corpus": "triplets.jsonl",            // trains the bigram scorer
//     "smoothing_k": 0.1
//   }
// Relative paths resolve against the config file's directory. Length stats
// come from "stats", then "stats_path", then the scorer corpus. Without a
// scorer corpus the scorer is untrained and scoring reports
// ScorerUnavailable.
ScoringSetup scoring_setup_from_json(const Json& config, const std::filesystem::path& base_dir = {});
ScoringSetup load_scoring_setup(const std::filesystem::path& path);

struct HttpReply {
  int status = 200;
  Json body;
};

// Transport-free request handling; the HTTP server is a thin shell around it.
class ScoringService {
 public:
  explicit ScoringService(ScoringSetup setup);

  HttpReply score(const Json& request) const;
  HttpReply score_batch(const Json& requests) const;
  HttpReply health() const;

  const ScoringSetup& setup() const { return setup_; }

 private:
  struct Parsed {
    ScoreItem item;
    std::optional<std::string> config_id;
  };
  Parsed parse_request(const Json& request) const;
  Json score_parsed(const Parsed& parsed) const;

  ScoringSetup setup_;
};

// Serves POST /v1/score, POST /v1/score/batch and GET /v1/health.
class ScoreServer {
 public:
  explicit ScoreServer(std::shared_ptr<const ScoringService> service);
  ~ScoreServer();
  ScoreServer(const ScoreServer&) = delete;
  ScoreServer& operator=(const ScoreServer&) = delete;

  // Binds and blocks until stop(). port 0 binds an ephemeral port.
  bool listen(const std::string& host, int port);
  // Binds now and serves on a background thread; returns the bound port or -1.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

 private:
  std::shared_ptr<const ScoringService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace rationlog
