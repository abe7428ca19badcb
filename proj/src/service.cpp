#include "rationlog/service.hpp"

#include <httplib.h>

#include "rationlog/cot.hpp"
#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {

RewardContext ScoringSetup::context(const std::string& config_id) const {
  auto it = configs.find(config_id);
  if (it == configs.end()) throw Error(ErrorKind::kInvalidConfig, "unknown config_id '" + config_id + "'");
  return RewardContext{it->second, stats, scorer};
}

ScoringSetup scoring_setup_from_json(const Json& config, const std::filesystem::path& base_dir) {
  if (!config.is_object()) throw Error(ErrorKind::kInvalidConfig, "scoring config must be an object");
  auto resolve_path = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  ScoringSetup setup;
  setup.configs[kDefaultConfigId] =
      config.contains("reward") ? reward_config_from_json(config["reward"]) : RewardConfig{};
  if (auto it = config.find("configs"); it != config.end()) {
    if (!it->is_object()) throw Error(ErrorKind::kInvalidConfig, "'configs' must be an object");
    for (const auto& [id, value] : it->items()) setup.configs[id] = reward_config_from_json(value);
  }

  std::vector<CotTriplet> triplets;
  if (config.contains("scorer_corpus")) triplets = read_triplets_jsonl(resolve_path(json_string(config, "scorer_corpus")));
  const double k = config.contains("smoothing_k") ? json_number(config, "smoothing_k") : BigramScorer::kDefaultK;
  std::vector<std::string> texts;
  for (const auto& t : triplets) texts.push_back(t.cot_analysis);
  setup.scorer = std::make_shared<BigramScorer>(BigramScorer::train(texts, k));

  if (config.contains("stats")) {
    setup.stats = length_stats_from_json(config["stats"]);
  } else if (config.contains("stats_path")) {
    setup.stats = length_stats_from_json(read_json(resolve_path(json_string(config, "stats_path"))));
  } else if (!triplets.empty()) {
    setup.stats = length_stats(triplets);
  } else {
    throw Error(ErrorKind::kInvalidConfig, "scoring config needs 'stats', 'stats_path' or 'scorer_corpus'");
  }
  return setup;
}

ScoringSetup load_scoring_setup(const std::filesystem::path& path) {
  return scoring_setup_from_json(read_json(path), path.parent_path());
}

namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, Json{{"error", message}}};
}

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kScorerUnavailable: return 503;
    case ErrorKind::kSchema:
    case ErrorKind::kPrecondition: return 400;
    default: return 500;
  }
}

}  // namespace

ScoringService::ScoringService(ScoringSetup setup) : setup_(std::move(setup)) {
  if (!setup_.configs.count(kDefaultConfigId))
    throw Error(ErrorKind::kInvalidConfig, "scoring setup lacks a default config");
  for (const auto& [id, cfg] : setup_.configs) cfg.validate();
  setup_.stats.validate();
}

ScoringService::Parsed ScoringService::parse_request(const Json& request) const {
  Parsed parsed;
  parsed.item = score_item_from_json(request);
  if (trim(parsed.item.log).empty()) throw Error(ErrorKind::kSchema, "'log' must be non-empty");
  if (parsed.item.output.empty()) throw Error(ErrorKind::kSchema, "'output' must be non-empty");
  if (auto it = request.find("config_id"); it != request.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorKind::kSchema, "'config_id' must be a string");
    parsed.config_id = it->get<std::string>();
  }
  return parsed;
}

Json ScoringService::score_parsed(const Parsed& parsed) const {
  const RewardContext ctx = setup_.context(parsed.config_id.value_or(kDefaultConfigId));
  const ScoredItem scored = score_item(parsed.item, ctx);
  Json body = scored_item_to_json(parsed.item, scored);
  body["config_id"] = parsed.config_id.value_or(kDefaultConfigId);
  return body;
}

HttpReply ScoringService::score(const Json& request) const {
  Parsed parsed;
  try {
    parsed = parse_request(request);
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  if (parsed.config_id && !setup_.configs.count(*parsed.config_id))
    return error_reply(404, "unknown config_id '" + *parsed.config_id + "'");
  try {
    return {200, score_parsed(parsed)};
  } catch (const Error& e) {
    return error_reply(status_for(e), e.what());
  }
}

HttpReply ScoringService::score_batch(const Json& requests) const {
  if (!requests.is_array()) return error_reply(400, "batch body must be a JSON array");
  std::vector<Parsed> parsed;
  parsed.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    try {
      parsed.push_back(parse_request(requests[i]));
    } catch (const Error& e) {
      return error_reply(400, "item " + std::to_string(i) + ": " + e.what());
    }
    const auto& id = parsed.back().config_id;
    if (id && !setup_.configs.count(*id))
      return error_reply(404, "item " + std::to_string(i) + ": unknown config_id '" + *id + "'");
  }
  Json out = Json::array();
  try {
    for (const auto& p : parsed) out.push_back(score_parsed(p));
  } catch (const Error& e) {
    return error_reply(status_for(e), e.what());
  }
  return {200, out};
}

HttpReply ScoringService::health() const {
  Json ids = Json::array();
  for (const auto& [id, _] : setup_.configs) ids.push_back(id);
  const auto* bigram = dynamic_cast<const BigramScorer*>(setup_.scorer.get());
  const bool scorer_ready = setup_.scorer && (!bigram || bigram->trained());
  return {200, Json{{"status", "ok"}, {"configs", ids}, {"scorer_ready", scorer_ready}}};
}

ScoreServer::ScoreServer(std::shared_ptr<const ScoringService> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto handle = [](const httplib::Request& req, httplib::Response& res, auto&& fn) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      res.status = 400;
      res.set_content(Json{{"error", std::string("invalid JSON: ") + e.what()}}.dump(), "application/json");
      return;
    }
    const HttpReply reply = fn(body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Post("/v1/score", [this, handle](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [this](const Json& b) { return service_->score(b); });
  });
  server_->Post("/v1/score/batch", [this, handle](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [this](const Json& b) { return service_->score_batch(b); });
  });
  server_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = service_->health();
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  });
}

ScoreServer::~ScoreServer() { stop(); }

bool ScoreServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int ScoreServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) return -1;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void ScoreServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rationlog
