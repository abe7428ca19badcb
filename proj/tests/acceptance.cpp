// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>

#include "rationlog/annotation.hpp"
#include "rationlog/dataset.hpp"
#include "rationlog/error.hpp"
#include "rationlog/evaluator.hpp"
#include "rationlog/grpo.hpp"
#include "rationlog/reward.hpp"
#include "rationlog/rng.hpp"
#include "rationlog/service.hpp"
#include "rationlog/template_miner.hpp"
#include "rationlog/text.hpp"

namespace fs = std::filesystem;
using namespace rationlog;

namespace {

const fs::path kData = RATIONLOG_DATA_DIR;
const std::string kCli = RATIONLOG_CLI_PATH;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int number, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++g_failures;
  std::printf("%s %2d %-28s %.3fs/%.0fs  %s\n", o.pass ? "PASS" : "FAIL", number, name.c_str(), secs, budget_s,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// Mock-policy simulation context fitted to the policy's grounded analyses.
RewardContext sim_context(const std::vector<LabeledLog>& data, const RewardConfig& cfg) {
  const auto refs = reference_analyses(data);
  double sum = 0.0;
  for (const auto& r : refs) sum += static_cast<double>(split_whitespace(r).size());
  const LengthStats stats{sum / static_cast<double>(refs.size()), 1.0, refs.size()};
  return RewardContext{cfg, stats, std::make_shared<BigramScorer>(BigramScorer::train(refs))};
}

Outcome metric_oracle() {
  const double a = prf1_from_rates(0.900, 0.919).f1;
  const double b = prf1_from_rates(0.724, 0.964).f1;
  const double c = prf1(ConfusionMatrix{919, 102, 0, 81}).f1;
  const bool ok = std::abs(a - 0.909) <= 1e-3 && std::abs(b - 0.827) <= 1e-3 && std::abs(c - 0.909) <= 1e-3;
  return {ok, "F1 " + fmt(a) + " (0.909), " + fmt(b) + " (0.827), matrix " + fmt(c)};
}

Outcome correction_breakdown() {
  std::vector<CorrectionEntry> ledger;
  TemplateId id = 0;
  const std::pair<ErrorCategory, int> counts[] = {{ErrorCategory::kSystemError, 78},
                                                  {ErrorCategory::kNetworkIssue, 47},
                                                  {ErrorCategory::kHardwareFailure, 40},
                                                  {ErrorCategory::kSoftwareException, 56}};
  for (auto [c, n] : counts)
    for (int i = 0; i < n; ++i) ledger.push_back({id++, Label::kNormal, Label::kAnomalous, c, "", ResolvedBy::kUnanimous});
  for (int i = 0; i < 4; ++i)
    ledger.push_back({id++, Label::kAnomalous, Label::kNormal, ErrorCategory::kOther, "", ResolvedBy::kUnanimous});
  const auto report = correction_report(ledger);
  const double expected[] = {34.7, 20.9, 17.8, 24.9, 1.8};
  bool ok = report.rows.size() == 5 && report.total == 225 && report.total_percentage == 100.0;
  std::string got;
  for (std::size_t i = 0; ok && i < 5; ++i) {
    ok = std::abs(report.rows[i].percentage - expected[i]) < 1e-9;
    got += (i ? "/" : "") + fmt(report.rows[i].percentage, 1);
  }
  return {ok, got + ", total " + std::to_string(report.total) + "/" + fmt(report.total_percentage, 1)};
}

Outcome gating_fuzz() {
  static const char* kPieces[] = {"<think>", "</think>", "<answer>", "</answer>", "normal", "abnormal", "anomaly",
                                  "x",       " ",        "\n",       "<",         ">",        "/",       "think",
                                  "answer",  "\xff",     "maybe",    "Normal."};
  Rng rng(20240601);
  const RewardConfig cfg;
  const LengthStats stats{12.0, 3.0, 10};
  const BigramScorer scorer = BigramScorer::train({"the node reported an error", "the job finished normally"});
  std::size_t malformed = 0, violations = 0, exceptions = 0;
  const std::size_t n = 20000;
  for (std::size_t i = 0; i < n; ++i) {
    std::string raw;
    const std::size_t parts = rng.uniform_index(12);
    for (std::size_t j = 0; j < parts; ++j) {
      if (rng.bernoulli(0.1)) {
        raw += static_cast<char>(rng.uniform_index(256));
      } else {
        raw += kPieces[rng.uniform_index(std::size(kPieces))];
      }
    }
    try {
      if (parse_output(raw).well_formed) continue;
      ++malformed;
      const auto b = total_reward(raw, rng.bernoulli(0.5) ? Label::kAnomalous : Label::kNormal, "some log line",
                                  stats, cfg, scorer);
      if (!(b == RewardBreakdown{0, 0, 0, 0, 0, 0, cfg.r_malformed})) ++violations;
    } catch (...) {
      ++exceptions;
    }
  }
  return {malformed >= 10000 && violations == 0 && exceptions == 0,
          std::to_string(n) + " strings, " + std::to_string(malformed) + " malformed, " +
              std::to_string(violations) + " violations, " + std::to_string(exceptions) + " exceptions"};
}

Outcome text_metrics() {
  auto t = [](const char* s) { return split_whitespace(s); };
  struct Case {
    double got, want;
  };
  const Case cases[] = {
      {bleu2(t("a b c d"), t("a b c d")), 1.0},
      {bleu2(t("a b c d"), t("e f g h")), 0.0},
      {bleu2(t("a b c d"), t("a b x d")), std::sqrt(3.0 / 4.0 * 1.0 / 3.0)},
      {rouge_l(t("a b c d"), t("a b c d")), 1.0},
      {rouge_l(t("a b c d"), t("e f g h")), 0.0},
      {rouge_l(t("a b c d"), t("a c d")), 6.0 / 7.0},
  };
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::abs(c.got - c.want));
  return {worst <= 1e-9, std::to_string(std::size(cases)) + " cases, max error " + std::to_string(worst)};
}

// Tolerances are 1e-6 on top of the additive epsilon's own contribution:
// dividing by (sigma + eps) shrinks the variance by about 2 eps / sigma, and
// rescaling by c moves each advantage by |A| eps |1/sigma - 1/(c sigma)|.
Outcome advantage_properties() {
  Rng rng(424242);
  double worst_mean = 0.0;
  std::size_t var_fail = 0, scale_fail = 0, var_raw_within = 0, scale_raw_within = 0;
  for (int g = 0; g < 1000; ++g) {
    RewardGroup group{static_cast<std::uint64_t>(g), {}};
    const std::size_t n = 2 + rng.uniform_index(31);
    for (std::size_t i = 0; i < n; ++i) group.rewards.push_back(-2.0 + 5.0 * rng.uniform01());
    double mu = 0.0;
    for (double r : group.rewards) mu += r;
    mu /= static_cast<double>(n);
    double sigma = 0.0;
    for (double r : group.rewards) sigma += (r - mu) * (r - mu);
    sigma = std::sqrt(sigma / static_cast<double>(n));
    const double eps = group.epsilon;

    const auto a = group_advantages(group);
    double m = 0.0;
    for (double x : a) m += x;
    m /= static_cast<double>(n);
    double v = 0.0;
    for (double x : a) v += (x - m) * (x - m);
    v /= static_cast<double>(n);
    worst_mean = std::max(worst_mean, std::abs(m));
    var_fail += std::abs(v - 1.0) > 1e-6 + 2.0 * eps / sigma;
    var_raw_within += std::abs(v - 1.0) <= 1e-6;

    RewardGroup scaled = group;
    const double c = 0.01 + 100.0 * rng.uniform01();
    for (auto& r : scaled.rewards) r *= c;
    const auto b = group_advantages(scaled);
    bool raw_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double drift = std::abs(a[i] - b[i]);
      const double eps_term = std::abs(a[i]) * eps * std::abs(1.0 / sigma - 1.0 / (c * sigma));
      scale_fail += drift > 1e-6 + eps_term;
      raw_ok = raw_ok && drift <= 1e-6;
    }
    scale_raw_within += raw_ok;
  }
  bool zeros = true;
  for (int g = 0; g < 100; ++g) {
    const double r = -2.0 + 5.0 * rng.uniform01();
    for (double x : group_advantages({0, std::vector<double>(2 + rng.uniform_index(10), r)})) zeros = zeros && x == 0.0;
  }
  const bool ok = worst_mean < 1e-9 && var_fail == 0 && scale_fail == 0 && zeros;
  return {ok, "max |mean| " + std::to_string(worst_mean) + "; beyond 1e-6 + eps term: variance " +
                  std::to_string(var_fail) + ", rescale " + std::to_string(scale_fail) + "; within bare 1e-6: " +
                  std::to_string(var_raw_within) + "/1000 variance, " + std::to_string(scale_raw_within) +
                  "/1000 rescale" + (zeros ? "; equal groups exact 0" : "; equal groups NOT 0")};
}

struct PairedRecall {
  std::vector<double> asym, sym;
  int wins = 0;
};

PairedRecall paired_runs(AdvantageMode mode) {
  const RewardConfig asym_cfg;
  const RewardConfig sym_cfg = asym_cfg.without_asymmetry();
  PairedRecall out;
  for (std::uint64_t run = 0; run < 20; ++run) {
    const auto data = synthetic_alignment_set(400, 1000 + run, 0.4);
    TrainOptions opt;
    opt.steps = 300;
    opt.lr = 0.5;
    opt.group_size = 8;
    opt.rng_seed = 7000 + run;
    opt.advantage_mode = mode;
    opt.probe = synthetic_alignment_set(400, 5000 + run, 0.4);
    const auto a = train_mock(MockPolicy::zeros(), data, sim_context(data, asym_cfg), opt);
    const auto s = train_mock(MockPolicy::zeros(), data, sim_context(data, sym_cfg), opt);
    out.asym.push_back(a.metrics.back().probe_recall);
    out.sym.push_back(s.metrics.back().probe_recall);
    out.wins += out.asym.back() > out.sym.back();
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// Gated on the default mean-centered advantages. The std-normalized run is
// reported for reference: with a binary verdict every mixed group takes two
// reward values, and std normalization erases the gap between them.
Outcome asymmetry_effect() {
  const auto centered = paired_runs(AdvantageMode::kMeanCentered);
  const auto normalized = paired_runs(AdvantageMode::kGroupNormalized);
  const double ma = median(centered.asym), ms = median(centered.sym);
  return {ma > ms && centered.wins >= 14,
          "median recall " + fmt(ma) + " vs " + fmt(ms) + ", asymmetric wins " + std::to_string(centered.wins) +
              "/20 (std-normalized reference: " + fmt(median(normalized.asym)) + " vs " +
              fmt(median(normalized.sym)) + ", " + std::to_string(normalized.wins) + "/20)"};
}

Outcome thinking_effect() {
  const auto data = synthetic_alignment_set(300, 77, 0.4);
  auto mean_total = [&](const RewardConfig& cfg, double overlap) {
    const auto ctx = sim_context(data, cfg);
    MockPolicy policy = MockPolicy::zeros(1.0, overlap);
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<Label> verdicts;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto ro = rollout(policy, data[i].log_text, data[i].truth, 8, 900 + i, ctx, i);
      for (double r : ro.group.rewards) sum += r;
      count += ro.group.rewards.size();
      verdicts.insert(verdicts.end(), ro.verdicts.begin(), ro.verdicts.end());
    }
    return std::make_pair(sum / static_cast<double>(count), verdicts);
  };
  const auto [high, v_high] = mean_total(RewardConfig{}, 1.0);
  const auto [low, v_low] = mean_total(RewardConfig{}, 0.0);
  const auto [high_off, v3] = mean_total(RewardConfig{}.without_thinking(), 1.0);
  const auto [low_off, v4] = mean_total(RewardConfig{}.without_thinking(), 0.0);
  const bool same_verdicts = v_high == v_low && v_high == v3 && v_high == v4;
  return {same_verdicts && high > low && high_off == low_off,
          "mean total high " + fmt(high) + " > low " + fmt(low) + "; without thinking gap " +
              fmt(high_off - low_off, 17) + (same_verdicts ? ", verdicts identical" : ", verdicts DIFFER")};
}

Corpus random_corpus(Rng& rng, std::size_t n, double anomaly_rate) {
  static const char* kMessages[] = {"generating core.", "instruction cache parity error corrected",
                                    "data TLB error interrupt", "job exited normally with status ",
                                    "Connection refused by host node"};
  Corpus c{"rand", {}};
  std::int64_t ts = 1117838570;
  for (std::size_t i = 0; i < n; ++i) {
    ts += static_cast<std::int64_t>(rng.uniform_index(3));
    LogRecord r;
    r.seq_index = i;
    r.timestamp = ts;
    r.label = rng.bernoulli(anomaly_rate) ? Label::kAnomalous : Label::kNormal;
    r.alert_tag = is_anomalous(r.label) ? "KERNDTLB" : "-";
    r.content = std::string(kMessages[rng.uniform_index(std::size(kMessages))]) + std::to_string(rng.uniform_index(50));
    c.records.push_back(std::move(r));
  }
  return c;
}

Outcome dataset_invariants() {
  Rng rng(8);
  std::size_t problems = 0;
  std::string first_problem;
  auto fail = [&](const std::string& what) {
    if (problems++ == 0) first_problem = what;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Corpus corpus = random_corpus(rng, 3000 + rng.uniform_index(2000), 0.2);
    const double fraction = 0.8;
    const auto [train, test] = chronological_split(corpus, fraction);
    std::set<SeqIndex> train_seqs;
    for (const auto& r : train.records) train_seqs.insert(r.seq_index);
    for (const auto& r : test.records)
      if (train_seqs.count(r.seq_index)) fail("split overlap");
    if (train.records.size() + test.records.size() != corpus.records.size()) fail("split loses records");
    const auto& last = train.records.back();
    const auto& first = test.records.front();
    if (!(std::tie(last.timestamp, last.seq_index) < std::tie(first.timestamp, first.seq_index)))
      fail("boundary order");

    const auto sample = sample_template_set(build_pool(train, {}, PoolMode::kRecord), 2000, 0.15,
                                            static_cast<std::uint64_t>(trial));
    const auto anomalous = std::count_if(sample.begin(), sample.end(), [](const LogRecord& r) { return is_anomalous(r.label); });
    if (anomalous != 300 || sample.size() - anomalous != 1700) fail("sample composition");
    for (const auto& r : sample)
      if (!train_seqs.count(r.seq_index)) fail("sample outside train");

    // Sessions over the whole timeline straddle the boundary; exclusion
    // against the sampled training records must leave no shared record.
    std::set<SeqIndex> sampled;
    for (const auto& r : sample) sampled.insert(r.seq_index);
    const std::size_t window = 1 + rng.uniform_index(150);
    for (const auto& s : exclude_leakage(build_sessions(corpus.records, window), sampled))
      for (auto ref : s.record_refs)
        if (sampled.count(ref)) fail("leakage");
  }
  std::vector<LogRecord> records = random_corpus(rng, 250, 0.1).records;
  std::vector<std::size_t> sizes;
  for (const auto& s : build_sessions(records, 100)) sizes.push_back(s.record_refs.size());
  if (sizes != std::vector<std::size_t>{100, 100, 50}) fail("250/100 session sizes");
  return {problems == 0, "200 corpora, " + std::to_string(problems) + " violations" +
                             (problems ? " (first: " + first_problem + ")" : "") + "; sessions [100,100,50]"};
}

Outcome fleiss_oracle() {
  AgreementMatrix perfect{{{3, 0}, {0, 3}, {3, 0}}, 3};
  const double k_perfect = fleiss_kappa(perfect);
  // {A,A} and {A,N}: Pbar 0.5, Pe 0.625, kappa -1/3.
  AgreementMatrix hand{{{0, 2}, {1, 1}}, 2};
  const double k_hand = fleiss_kappa(hand);
  return {k_perfect == 1.0 && std::abs(k_hand + 1.0 / 3.0) <= 1e-9,
          "perfect " + fmt(k_perfect, 12) + ", hand case " + fmt(k_hand, 12) + " (-1/3)"};
}

Outcome service_equivalence() {
  const auto setup = load_scoring_setup(kData / "scoring_config.json");
  auto service = std::make_shared<const ScoringService>(setup);
  ScoreServer server(service);
  const int port = server.start();
  if (port <= 0) return {false, "server did not start"};
  httplib::Client client("127.0.0.1", port);

  const auto logs = synthetic_alignment_set(200, 99, 0.4);
  const char* kConfigs[] = {"default", "no_ac", "no_te"};
  Rng rng(31337);
  std::size_t mismatches = 0, transport = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& log = logs[rng.uniform_index(logs.size())];
    MockPolicy policy = MockPolicy::zeros(1.0, rng.uniform01());
    std::string output = policy.completion(log.log_text, rng.bernoulli(0.5) ? Label::kAnomalous : Label::kNormal,
                                           rng.uniform_index(3));
    if (rng.bernoulli(0.2)) output = output.substr(0, 1 + rng.uniform_index(output.size() - 1));
    const std::string config_id = kConfigs[rng.uniform_index(3)];
    Json req{{"log", log.log_text}, {"output", output}, {"truth", to_string(log.truth)}, {"config_id", config_id}, {"id", i}};

    const auto res = client.Post("/v1/score", req.dump(), "application/json");
    if (!res || res->status != 200) {
      ++transport;
      continue;
    }
    const Json body = Json::parse(res->body);
    const auto lib = score_item(score_item_from_json(req), setup.context(config_id)).breakdown;
    const RewardBreakdown via_http{body["format"].get<double>(),    body["answer"].get<double>(),
                                   body["grounding"].get<double>(), body["coherence"].get<double>(),
                                   body["brevity"].get<double>(),   body["think"].get<double>(),
                                   body["total"].get<double>()};
    if (!(via_http == lib)) ++mismatches;
  }
  server.stop();
  return {mismatches == 0 && transport == 0, "1000 requests, " + std::to_string(mismatches) + " mismatches, " +
                                                 std::to_string(transport) + " transport errors"};
}

int sh(const std::string& cmd, const fs::path& log) {
  return std::system((cmd + " >>" + log.string() + " 2>&1").c_str());
}

Outcome end_to_end() {
  const fs::path dir = fs::temp_directory_path() / ("rationlog_e2e_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "run.log";
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const std::string cli = q(kCli);

  std::vector<std::string> steps = {
      cli + " ingest " + q(kData / "synthetic_bgl_1000.log") + " --name BGL -o " + q(dir / "corpus.jsonl"),
      cli + " mine --corpus " + q(dir / "corpus.jsonl") + " --templates " + q(dir / "templates.jsonl") +
          " --assignments " + q(dir / "assignments.jsonl"),
      cli + " correct --ledger " + q(kData / "ledger_example.jsonl") + " --templates " + q(dir / "templates.jsonl") +
          " --assignments " + q(dir / "assignments.jsonl") + " --corpus " + q(dir / "corpus.jsonl") +
          " --corpus-out " + q(dir / "corrected_corpus.jsonl") + " --report-json " + q(dir / "correction.json") +
          " -o " + q(dir / "corrected.jsonl"),
      cli + " split --corpus " + q(dir / "corrected_corpus.jsonl") + " --out-dir " + q(dir / "split") +
          " --train-size 200 --anomaly-rate 0.15 --test-size 150 --seed 1",
      cli + " sessions --window 20 --records " + q(dir / "split" / "test.jsonl") + " --exclude " +
          q(dir / "split" / "template_train.jsonl") + " -o " + q(dir / "sessions.jsonl"),
  };
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (int rc = sh(steps[i], log); rc != 0) return {false, "step " + std::to_string(i + 1) + " exited " + std::to_string(rc)};

  // A keyword baseline stands in for the fine-tuned model's outputs.
  const auto corrected = read_template_index(dir / "corrected.jsonl");
  static const char* kCues[] = {"error", "fatal", "failed", "panic", "refused", "assert", "interrupt"};
  std::vector<Json> batch;
  for (const auto& t : corrected.templates) {
    const std::string lowered = to_lower(t.example_content);
    const bool flagged = std::any_of(std::begin(kCues), std::end(kCues),
                                     [&](const char* c) { return lowered.find(c) != std::string::npos; });
    const auto output = MockPolicy::zeros().completion(t.example_content, flagged ? Label::kAnomalous : Label::kNormal, t.template_id);
    batch.push_back(Json{{"id", t.template_id}, {"log", t.example_content}, {"output", output}, {"truth", to_string(t.label)}});
  }
  write_jsonl(dir / "batch.jsonl", batch);
  if (int rc = sh(cli + " score --batch " + q(dir / "batch.jsonl") + " --config " + q(kData / "scoring_config.json") +
                      " --workers 4 -o " + q(dir / "scored.jsonl"),
                  log);
      rc != 0)
    return {false, "score exited " + std::to_string(rc)};
  if (int rc = sh(cli + " eval --granularity template --predictions " + q(dir / "scored.jsonl") + " --templates " +
                      q(dir / "corrected.jsonl") + " -o " + q(dir / "template_metrics.json"),
                  log);
      rc != 0)
    return {false, "template eval exited " + std::to_string(rc)};

  // Session verdicts: anomalous iff any member's template was flagged.
  std::map<std::uint64_t, Label> template_verdict = read_predictions_jsonl(dir / "scored.jsonl");
  std::map<SeqIndex, TemplateId> assignment;
  for_each_jsonl(dir / "assignments.jsonl", [&](const Json& row) {
    assignment[static_cast<SeqIndex>(json_int(row, "seq"))] = static_cast<TemplateId>(json_int(row, "template_id"));
  });
  std::vector<Json> session_preds;
  for (const auto& s : read_sessions_jsonl(dir / "sessions.jsonl")) {
    bool any = false;
    for (auto ref : s.record_refs) any = any || is_anomalous(template_verdict.at(assignment.at(ref)));
    session_preds.push_back(Json{{"id", s.session_id}, {"label", any ? "anomalous" : "normal"}});
  }
  write_jsonl(dir / "session_preds.jsonl", session_preds);
  if (int rc = sh(cli + " eval --granularity session --predictions " + q(dir / "session_preds.jsonl") + " --sessions " +
                      q(dir / "sessions.jsonl") + " -o " + q(dir / "session_metrics.json"),
                  log);
      rc != 0)
    return {false, "session eval exited " + std::to_string(rc)};

  std::string summary;
  bool populated = true;
  for (const char* name : {"template_metrics.json", "session_metrics.json"}) {
    const Json report = read_json(dir / name);
    for (const char* key : {"granularity", "precision", "recall", "f1", "tp", "fp", "tn", "fn"})
      populated = populated && report.contains(key) && !report[key].is_null();
    summary += std::string(report.value("granularity", "?")) + " F1 " + fmt(report.value("f1", -1.0), 3) + " ";
  }
  fs::remove_all(dir);
  return {populated, summary + (populated ? "(all report fields populated)" : "(report fields MISSING)")};
}

}  // namespace

int main() {
  criterion(1, "metric oracle", 1, metric_oracle);
  criterion(2, "correction report", 1, correction_breakdown);
  criterion(3, "reward gating fuzz", 10, gating_fuzz);
  criterion(4, "text-metric oracles", 1, text_metrics);
  criterion(5, "GRPO advantage properties", 10, advantage_properties);
  criterion(6, "asymmetry effect", 60, asymmetry_effect);
  criterion(7, "thinking-reward effect", 10, thinking_effect);
  criterion(8, "dataset-builder invariants", 10, dataset_invariants);
  criterion(9, "Fleiss kappa oracle", 1, fleiss_oracle);
  criterion(10, "service/library equivalence", 60, service_equivalence);
  criterion(11, "end-to-end smoke", 30, end_to_end);
  std::printf("%s: %d failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
