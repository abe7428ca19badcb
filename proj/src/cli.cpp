#include "rationlog/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "rationlog/annotation.hpp"
#include "rationlog/corpus.hpp"
#include "rationlog/cot.hpp"
#include "rationlog/dataset.hpp"
#include "rationlog/error.hpp"
#include "rationlog/evaluator.hpp"
#include "rationlog/grpo.hpp"
#include "rationlog/reward.hpp"
#include "rationlog/service.hpp"
#include "rationlog/template_miner.hpp"

namespace fs = std::filesystem;

namespace rationlog {
namespace {

struct Options {
  // ingest
  std::string raw_path, corpus_name = "BGL", corpus_path, out_path;
  // mine
  std::string templates_path, assignments_path;
  MinerParams miner;
  // correct
  std::string ledger_path, corpus_out_path, report_json_path;
  // split
  std::string out_dir;
  SplitSpec split;
  std::string pool_mode = "record";
  // sessions
  std::string records_path, exclude_path;
  std::size_t max_sessions = 0;
  // distill
  std::string endpoint, model = "teacher", stats_out_path;
  unsigned parallel = 4;
  int timeout_ms = 30000;
  // score / serve
  std::string batch_path, config_path, config_id = kDefaultConfigId, host = "127.0.0.1";
  unsigned workers = 1;
  int port = 8080;
  // eval
  std::string granularity, predictions_path, sessions_path;
};

std::string scoring_config_path(const Options& o) {
  if (!o.config_path.empty()) return o.config_path;
  if (const char* env = std::getenv("RATIONLOG_CONFIG"); env && *env) return env;
  throw Error(ErrorKind::kInvalidConfig, "no scoring config: pass --config or set RATIONLOG_CONFIG");
}

int run_ingest(const Options& o, std::ostream& out) {
  const LoadResult loaded = load_corpus(o.raw_path, o.corpus_name);
  write_corpus_jsonl(o.out_path, loaded.corpus);
  out << "ingested " << loaded.corpus.records.size() << " records, skipped " << loaded.skipped_count << '\n';
  return 0;
}

int run_mine(const Options& o, std::ostream& out) {
  const Corpus corpus = read_corpus_jsonl(o.corpus_path, o.corpus_name);
  const TemplateIndex index = mine_templates(corpus, o.miner);
  write_templates_jsonl(o.templates_path, index);
  if (!o.assignments_path.empty()) write_assignments_jsonl(o.assignments_path, index);
  std::size_t anomalous = 0;
  for (const auto& t : index.templates) anomalous += is_anomalous(t.label);
  out << "mined " << index.templates.size() << " templates (" << anomalous << " anomalous) from "
      << corpus.records.size() << " records\n";
  return 0;
}

int run_correct(const Options& o, std::ostream& out) {
  const auto ledger = read_ledger_jsonl(o.ledger_path);
  const TemplateIndex original = read_template_index(o.templates_path, o.assignments_path, o.miner);
  const TemplateIndex corrected = apply_corrections(original, ledger);
  write_templates_jsonl(o.out_path, corrected);
  if (!o.corpus_out_path.empty()) {
    if (o.corpus_path.empty() || o.assignments_path.empty())
      throw Error(ErrorKind::kPrecondition, "--corpus-out needs --corpus and --assignments");
    const Corpus corpus = read_corpus_jsonl(o.corpus_path, o.corpus_name);
    write_corpus_jsonl(o.corpus_out_path, relabel_records(corpus, original, corrected));
  }
  if (!ledger.empty()) {
    const auto report = correction_report(ledger);
    out << render_report_text(report);
    if (!o.report_json_path.empty()) write_json(o.report_json_path, report_to_json(report));
  }
  return 0;
}

int run_split(const Options& o, std::ostream& out) {
  SplitSpec spec = o.split;
  spec.pool_mode = pool_mode_from_string(o.pool_mode);
  spec.validate();
  const Corpus corpus = read_corpus_jsonl(o.corpus_path, o.corpus_name);
  auto [train, test] = chronological_split(corpus, spec.train_fraction);

  TemplateIndex index;
  if (spec.pool_mode == PoolMode::kTemplate) {
    if (o.templates_path.empty() || o.assignments_path.empty())
      throw Error(ErrorKind::kPrecondition, "template pool mode needs --templates and --assignments");
    index = read_template_index(o.templates_path, o.assignments_path, o.miner);
  }
  const auto pool = build_pool(train, index, spec.pool_mode);
  const auto template_train = sample_template_set(pool, spec.template_train_size, spec.anomaly_rate, spec.rng_seed);
  std::vector<LogRecord> test_entries(
      test.records.begin(), test.records.begin() + std::min(spec.test_size, test.records.size()));

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  write_corpus_jsonl(dir / "train.jsonl", train);
  write_corpus_jsonl(dir / "test.jsonl", test);
  write_records_jsonl(dir / "template_train.jsonl", template_train);
  write_records_jsonl(dir / "test_entries.jsonl", test_entries);

  std::size_t train_anomalous = 0;
  for (const auto& r : template_train) train_anomalous += is_anomalous(r.label);
  const Json manifest{
      {"seed", spec.rng_seed},
      {"train_fraction", spec.train_fraction},
      {"anomaly_rate", spec.anomaly_rate},
      {"template_train_size", spec.template_train_size},
      {"test_size", spec.test_size},
      {"pool_mode", to_string(spec.pool_mode)},
      {"counts",
       {{"corpus", corpus.records.size()},
        {"train", train.records.size()},
        {"test", test.records.size()},
        {"template_train", template_train.size()},
        {"template_train_anomalous", train_anomalous},
        {"test_entries", test_entries.size()}}},
      {"digests",
       {{"train", partition_digest(train.records)},
        {"test", partition_digest(test.records)},
        {"template_train", partition_digest(template_train)},
        {"test_entries", partition_digest(test_entries)}}}};
  write_json(dir / "manifest.json", manifest);
  out << "train " << train.records.size() << ", test " << test.records.size() << ", template-level train "
      << template_train.size() << " (" << train_anomalous << " anomalous)\n";
  return 0;
}

int run_sessions(const Options& o, std::ostream& out) {
  const Corpus records = read_corpus_jsonl(o.records_path, o.corpus_name);
  auto sessions = build_sessions(records.records, o.split.window_size);
  const std::size_t built = sessions.size();
  if (!o.exclude_path.empty()) {
    std::set<SeqIndex> train_seqs;
    for_each_jsonl(o.exclude_path, [&](const Json& row) { train_seqs.insert(static_cast<SeqIndex>(json_int(row, "seq"))); });
    sessions = exclude_leakage(sessions, train_seqs);
  }
  if (o.max_sessions > 0 && sessions.size() > o.max_sessions) sessions.resize(o.max_sessions);
  write_sessions_jsonl(o.out_path, sessions);
  std::size_t anomalous = 0;
  for (const auto& s : sessions) anomalous += is_anomalous(s.label);
  out << "built " << built << " sessions, kept " << sessions.size() << " (" << anomalous << " anomalous)\n";
  return 0;
}

int run_distill(const Options& o, std::ostream& out, std::ostream& err) {
  TeacherConfig cfg;
  cfg.base_url = o.endpoint;
  cfg.model = o.model;
  cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  cfg = teacher_config_from_env(cfg);

  std::vector<DistillItem> items;
  if (!o.templates_path.empty()) {
    for (const auto& t : read_template_index(o.templates_path).templates) items.push_back({t.example_content, t.label});
  } else {
    for (const auto& r : read_corpus_jsonl(o.records_path, o.corpus_name).records) items.push_back({r.content, r.label});
  }
  const auto summary = distill(items, http_teacher(cfg), o.parallel);
  for (const auto& reason : summary.drop_reasons) err << "dropped " << reason << '\n';
  write_triplets_jsonl(o.out_path, summary.triplets);
  if (!o.stats_out_path.empty() && !summary.triplets.empty())
    write_json(o.stats_out_path, length_stats_to_json(length_stats(summary.triplets)));
  out << "distilled " << summary.triplets.size() << " of " << items.size() << " items (" << summary.rerequested
      << " re-requested, " << summary.dropped << " dropped)\n";
  return 0;
}

int run_score(const Options& o, std::ostream& out) {
  const ScoringSetup setup = load_scoring_setup(scoring_config_path(o));
  const RewardContext ctx = setup.context(o.config_id);
  std::vector<ScoreItem> items;
  for_each_jsonl(o.batch_path, [&](const Json& row) { items.push_back(score_item_from_json(row)); });
  const auto scored = score_batch(items, ctx, o.workers);
  std::vector<Json> rows;
  rows.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) rows.push_back(scored_item_to_json(items[i], scored[i]));
  if (o.out_path.empty()) {
    for (const auto& r : rows) out << r.dump() << '\n';
  } else {
    write_jsonl(o.out_path, rows);
    out << "scored " << rows.size() << " outputs\n";
  }
  return 0;
}

std::vector<LabeledLog> read_labeled_logs(const fs::path& path) {
  std::vector<LabeledLog> logs;
  for_each_jsonl(path, [&](const Json& row) {
    logs.push_back({json_string(row, "log"), label_from_string(json_string(row, "truth"))});
  });
  return logs;
}

int run_grpo_sim(const Options& o, std::ostream& out) {
  const fs::path config_path(o.config_path);
  const Json cfg = read_json(config_path);
  const fs::path base = config_path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_relative() ? base / p : fs::path(p); };
  auto get = [&](const char* key, auto fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->get<decltype(fallback)>();
  };

  const auto seed = get("seed", std::uint64_t{0});
  std::vector<LabeledLog> dataset;
  if (cfg.contains("dataset")) {
    dataset = read_labeled_logs(resolve(json_string(cfg, "dataset")));
  } else {
    const Json synth = cfg.value("synthetic", Json::object());
    dataset = synthetic_alignment_set(synth.value("n", std::size_t{400}), seed,
                                      synth.value("ambiguous_anomaly_rate", 0.4));
  }
  TrainOptions options;
  options.steps = get("steps", options.steps);
  options.lr = get("lr", options.lr);
  options.group_size = get("group_size", options.group_size);
  options.clip_eps = get("clip_eps", options.clip_eps);
  options.rng_seed = seed;
  options.advantage_mode = advantage_mode_from_string(get("advantage_mode", std::string("mean_centered")));
  if (cfg.contains("probe")) options.probe = read_labeled_logs(resolve(json_string(cfg, "probe")));

  RewardContext ctx;
  ctx.config = cfg.contains("reward") ? reward_config_from_json(cfg["reward"]) : RewardConfig{};
  const auto refs = reference_analyses(dataset);
  ctx.scorer = std::make_shared<BigramScorer>(BigramScorer::train(refs));
  std::vector<CotTriplet> ref_triplets;
  for (std::size_t i = 0; i < refs.size(); ++i) ref_triplets.push_back({dataset[i].log_text, refs[i], dataset[i].truth});
  ctx.stats = length_stats(ref_triplets);

  const MockPolicy initial = MockPolicy::zeros(get("temperature", 1.0), get("think_overlap", 1.0));
  const TrainResult result = train_mock(initial, dataset, ctx, options);

  std::vector<Json> rows;
  for (const auto& m : result.metrics) rows.push_back(step_metrics_to_json(m));
  const std::string log_path = !o.out_path.empty() ? o.out_path : get("training_log", std::string());
  if (!log_path.empty()) write_jsonl(log_path, rows);
  const auto& last = result.metrics.back();
  out << Json{{"steps", last.step},
              {"final_mean_reward", last.mean_reward},
              {"probe_precision", last.probe_precision},
              {"probe_recall", last.probe_recall},
              {"theta", result.policy.theta}}
             .dump()
      << '\n';
  return 0;
}

int run_eval(const Options& o, std::ostream& out) {
  const auto predictions = read_predictions_jsonl(o.predictions_path);
  ConfusionMatrix m;
  if (o.granularity == "session") {
    if (o.sessions_path.empty()) throw Error(ErrorKind::kPrecondition, "session eval needs --sessions");
    std::map<SessionId, Label> by_session(predictions.begin(), predictions.end());
    m = evaluate_session(by_session, read_sessions_jsonl(o.sessions_path));
  } else {
    if (o.templates_path.empty()) throw Error(ErrorKind::kPrecondition, "template eval needs --templates");
    std::map<TemplateId, Label> by_template;
    for (const auto& [id, label] : predictions) by_template[static_cast<TemplateId>(id)] = label;
    m = evaluate_template(by_template, read_template_index(o.templates_path));
  }
  if (!o.out_path.empty()) write_json(o.out_path, metrics_report_json(o.granularity, m));
  out << metrics_report_text(o.granularity, m);
  return 0;
}

ScoreServer* g_server = nullptr;

int run_serve(const Options& o, std::ostream& out) {
  auto service = std::make_shared<const ScoringService>(load_scoring_setup(scoring_config_path(o)));
  ScoreServer server(service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  out << "serving on " << o.host << ':' << o.port << std::endl;
  const bool ok = server.listen(o.host, o.port);
  g_server = nullptr;
  if (!ok) throw Error(ErrorKind::kIo, "cannot listen on " + o.host + ":" + std::to_string(o.port));
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Log anomaly detection data pipeline and reward tooling", "rationlog"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Parse a raw BGL/Spirit log file into corpus JSONL");
  ingest->add_option("file", o.raw_path, "Raw log file")->required();
  ingest->add_option("--name", o.corpus_name, "Dataset name stored with each record");
  ingest->add_option("-o,--out", o.out_path, "Corpus JSONL output")->required();

  auto add_miner = [&](CLI::App* cmd) {
    cmd->add_option("--depth", o.miner.tree_depth, "Prefix tree depth");
    cmd->add_option("--threshold", o.miner.similarity_threshold, "Similarity threshold");
    cmd->add_option("--max-children", o.miner.max_children, "Maximum children per tree node");
  };

  auto* mine = app.add_subcommand("mine", "Mine parameter-masked templates from a corpus");
  mine->add_option("--corpus", o.corpus_path, "Corpus JSONL")->required();
  mine->add_option("--templates", o.templates_path, "Template JSONL output")->required();
  mine->add_option("--assignments", o.assignments_path, "Record-to-template JSONL output");
  add_miner(mine);

  auto* correct = app.add_subcommand("correct", "Apply an expert correction ledger to templates");
  correct->add_option("--ledger", o.ledger_path, "Correction ledger JSONL")->required();
  correct->add_option("--templates", o.templates_path, "Template JSONL")->required();
  correct->add_option("--assignments", o.assignments_path, "Record-to-template JSONL");
  correct->add_option("--corpus", o.corpus_path, "Corpus JSONL to relabel");
  correct->add_option("--corpus-out", o.corpus_out_path, "Relabeled corpus JSONL output");
  correct->add_option("--report-json", o.report_json_path, "Correction report JSON output");
  correct->add_option("-o,--out", o.out_path, "Corrected template JSONL output")->required();

  auto* split = app.add_subcommand("split", "Chronological split and template-level training sample");
  split->add_option("--corpus", o.corpus_path, "Corpus JSONL")->required();
  split->add_option("--templates", o.templates_path, "Template JSONL (template pool mode)");
  split->add_option("--assignments", o.assignments_path, "Assignments JSONL (template pool mode)");
  split->add_option("--out-dir", o.out_dir, "Output directory")->required();
  split->add_option("--train-fraction", o.split.train_fraction, "Chronological train fraction");
  split->add_option("--train-size", o.split.template_train_size, "Template-level training set size");
  split->add_option("--anomaly-rate", o.split.anomaly_rate, "Anomaly rate of the training sample");
  split->add_option("--test-size", o.split.test_size, "Template-level test entries");
  split->add_option("--seed", o.split.rng_seed, "Sampling seed");
  split->add_option("--pool-mode", o.pool_mode, "record | template")->check(CLI::IsMember({"record", "template"}));

  auto* sessions = app.add_subcommand("sessions", "Build fixed-window sessions");
  sessions->add_option("--window", o.split.window_size, "Window size")->required()->check(CLI::PositiveNumber);
  sessions->add_option("--records", o.records_path, "Ordered record JSONL (e.g. test.jsonl)")->required();
  sessions->add_option("--exclude", o.exclude_path, "Training records whose sessions are dropped");
  sessions->add_option("--max-sessions", o.max_sessions, "Keep at most this many sessions");
  sessions->add_option("-o,--out", o.out_path, "Session JSONL output")->required();

  auto* distill_cmd = app.add_subcommand("distill", "Collect chain-of-thought analyses from a teacher endpoint");
  distill_cmd->add_option("--endpoint", o.endpoint, "Teacher base URL")->required();
  distill_cmd->add_option("--model", o.model, "Teacher model name");
  auto* src_t = distill_cmd->add_option("--templates", o.templates_path, "Distill one analysis per template");
  auto* src_r = distill_cmd->add_option("--records", o.records_path, "Distill one analysis per record");
  src_t->excludes(src_r);
  distill_cmd->add_option("--parallel", o.parallel, "Concurrent requests")->check(CLI::PositiveNumber);
  distill_cmd->add_option("--timeout-ms", o.timeout_ms, "Per-request timeout");
  distill_cmd->add_option("--stats", o.stats_out_path, "Length statistics JSON output");
  distill_cmd->add_option("-o,--out", o.out_path, "Triplet JSONL output")->required();

  auto* score = app.add_subcommand("score", "Score model outputs with the reward function");
  score->add_option("--batch", o.batch_path, "JSONL of {log, output, truth[, id]}")->required();
  score->add_option("--config", o.config_path, "Scoring config JSON (default: $RATIONLOG_CONFIG)");
  score->add_option("--config-id", o.config_id, "Named reward config");
  score->add_option("--workers", o.workers, "Scoring threads")->check(CLI::PositiveNumber);
  score->add_option("-o,--out", o.out_path, "Output JSONL (default: stdout)");

  auto* grpo = app.add_subcommand("grpo-sim", "Run the mock-policy GRPO loop");
  grpo->add_option("--config", o.config_path, "Simulation config JSON")->required();
  grpo->add_option("-o,--out", o.out_path, "Per-step training log JSONL");

  auto* eval = app.add_subcommand("eval", "Precision / recall / F1 at session or template level");
  eval->add_option("--granularity", o.granularity, "session | template")
      ->required()
      ->check(CLI::IsMember({"session", "template"}));
  eval->add_option("--predictions", o.predictions_path, "Predictions JSONL {id, label}")->required();
  eval->add_option("--sessions", o.sessions_path, "Session JSONL");
  eval->add_option("--templates", o.templates_path, "Corrected template JSONL");
  eval->add_option("-o,--out", o.out_path, "Metrics report JSON output");

  auto* serve = app.add_subcommand("serve", "Serve the reward function over HTTP");
  serve->add_option("--port", o.port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--config", o.config_path, "Scoring config JSON (default: $RATIONLOG_CONFIG)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return 0;
    err << '\n' << app.help();
    return 2;
  }

  try {
    if (*ingest) return run_ingest(o, out);
    if (*mine) return run_mine(o, out);
    if (*correct) return run_correct(o, out);
    if (*split) return run_split(o, out);
    if (*sessions) return run_sessions(o, out);
    if (*distill_cmd) return run_distill(o, out, err);
    if (*score) return run_score(o, out);
    if (*grpo) return run_grpo_sim(o, out);
    if (*eval) return run_eval(o, out);
    if (*serve) return run_serve(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace rationlog
