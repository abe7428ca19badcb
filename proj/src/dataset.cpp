#include "rationlog/dataset.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "rationlog/error.hpp"
#include "rationlog/rng.hpp"
#include "rationlog/text.hpp"

namespace rationlog {

std::string_view to_string(PoolMode mode) {
  return mode == PoolMode::kRecord ? "record" : "template";
}

PoolMode pool_mode_from_string(std::string_view s) {
  if (s == "record") return PoolMode::kRecord;
  if (s == "template") return PoolMode::kTemplate;
  throw Error(ErrorKind::kInvalidConfig, "unknown pool mode '" + std::string(s) + "'");
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::kInvalidConfig, "train_fraction must lie in (0,1)");
  if (!(anomaly_rate > 0.0 && anomaly_rate < 1.0))
    throw Error(ErrorKind::kInvalidConfig, "anomaly_rate must lie in (0,1)");
  if (window_size < 1) throw Error(ErrorKind::kInvalidConfig, "window_size must be >= 1");
}

std::pair<Corpus, Corpus> chronological_split(const Corpus& corpus, double train_fraction) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0,1)");
  const std::size_t n = corpus.records.size();
  const double exact = static_cast<double>(n) * train_fraction;
  // Absorb representation error such as 10 * 0.7 = 7.000000000000001.
  const double nearest = std::round(exact);
  const auto n_train = static_cast<std::size_t>(
      std::abs(exact - nearest) < 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact));
  if (n_train == 0 || n_train >= n)
    throw Error(ErrorKind::kDegenerateSplit, "split of " + std::to_string(n) + " records at " +
                                                 std::to_string(train_fraction) + " leaves a side empty");
  Corpus train{corpus.name, {corpus.records.begin(), corpus.records.begin() + n_train}};
  Corpus test{corpus.name, {corpus.records.begin() + n_train, corpus.records.end()}};
  return {std::move(train), std::move(test)};
}

std::vector<PoolItem> build_pool(const Corpus& corpus, const TemplateIndex& index, PoolMode mode) {
  std::vector<PoolItem> pool;
  if (mode == PoolMode::kRecord) {
    pool.reserve(corpus.records.size());
    for (const auto& r : corpus.records) pool.push_back({r, r.label});
    return pool;
  }
  std::set<TemplateId> seen;
  for (const auto& r : corpus.records) {
    auto it = index.assignment.find(r.seq_index);
    if (it == index.assignment.end())
      throw Error(ErrorKind::kUnknownTemplate, "record " + std::to_string(r.seq_index) + " has no template");
    if (!seen.insert(it->second).second) continue;
    pool.push_back({r, index.find(it->second)->label});
  }
  return pool;
}

std::vector<LogRecord> sample_template_set(const std::vector<PoolItem>& pool, std::size_t size,
                                           double anomaly_rate, std::uint64_t rng_seed) {
  require(anomaly_rate > 0.0 && anomaly_rate < 1.0, "anomaly_rate must lie in (0,1)");
  const auto n_anomalous = static_cast<std::size_t>(std::llround(static_cast<double>(size) * anomaly_rate));
  const std::size_t n_normal = size - n_anomalous;

  std::vector<std::size_t> anomalous, normal;
  for (std::size_t i = 0; i < pool.size(); ++i)
    (is_anomalous(pool[i].label) ? anomalous : normal).push_back(i);
  if (anomalous.size() < n_anomalous)
    throw Error(ErrorKind::kInsufficientPool, "anomalous: need " + std::to_string(n_anomalous) +
                                                  ", have " + std::to_string(anomalous.size()));
  if (normal.size() < n_normal)
    throw Error(ErrorKind::kInsufficientPool,
                "normal: need " + std::to_string(n_normal) + ", have " + std::to_string(normal.size()));

  Rng rng(rng_seed);
  auto draw = [&rng](std::vector<std::size_t>& from, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(from.size() - i));
      std::swap(from[i], from[j]);
    }
    from.resize(k);
  };
  draw(anomalous, n_anomalous);
  draw(normal, n_normal);

  std::vector<std::size_t> chosen = std::move(anomalous);
  chosen.insert(chosen.end(), normal.begin(), normal.end());
  rng.shuffle(chosen);

  std::vector<LogRecord> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) {
    out.push_back(pool[i].record);
    out.back().label = pool[i].label;
  }
  return out;
}

std::vector<Session> build_sessions(const std::vector<LogRecord>& records, std::size_t window_size) {
  require(window_size >= 1, "window_size must be >= 1");
  std::vector<Session> sessions;
  for (std::size_t start = 0; start < records.size(); start += window_size) {
    Session s;
    s.session_id = sessions.size();
    const std::size_t end = std::min(records.size(), start + window_size);
    for (std::size_t i = start; i < end; ++i) {
      s.record_refs.push_back(records[i].seq_index);
      if (is_anomalous(records[i].label)) s.label = Label::kAnomalous;
    }
    sessions.push_back(std::move(s));
  }
  return sessions;
}

std::vector<Session> exclude_leakage(const std::vector<Session>& sessions,
                                     const std::set<SeqIndex>& train_records) {
  std::vector<Session> kept;
  for (const auto& s : sessions) {
    bool leaks = false;
    for (SeqIndex seq : s.record_refs) {
      if (train_records.count(seq)) {
        leaks = true;
        break;
      }
    }
    if (!leaks) kept.push_back(s);
  }
  return kept;
}

Corpus relabel_records(const Corpus& corpus, const TemplateIndex& original,
                       const TemplateIndex& corrected) {
  Corpus out = corpus;
  for (auto& r : out.records) {
    auto it = corrected.assignment.find(r.seq_index);
    if (it == corrected.assignment.end()) continue;
    const auto* before = original.find(it->second);
    const auto* after = corrected.find(it->second);
    if (before && after && before->label != after->label) r.label = after->label;
  }
  return out;
}

std::string partition_digest(const std::vector<LogRecord>& records) {
  std::uint64_t h = fnv1a64("");
  for (const auto& r : records) {
    h = fnv1a64(record_to_json(r).dump(), h);
    h = fnv1a64("\n", h);
  }
  return hex64(h);
}

Json session_to_json(const Session& s) {
  return Json{{"session_id", s.session_id}, {"seqs", s.record_refs}, {"label", to_string(s.label)}};
}

Session session_from_json(const Json& row) {
  Session s;
  s.session_id = static_cast<SessionId>(json_int(row, "session_id"));
  auto it = row.find("seqs");
  if (it == row.end() || !it->is_array()) throw Error(ErrorKind::kSchema, "expected array field 'seqs'");
  for (const auto& v : *it) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw Error(ErrorKind::kSchema, "seqs must hold integers");
    s.record_refs.push_back(v.get<SeqIndex>());
  }
  s.label = label_from_string(json_string(row, "label"));
  return s;
}

void write_sessions_jsonl(const std::filesystem::path& path, const std::vector<Session>& sessions) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& s : sessions) out << session_to_json(s).dump() << '\n';
}

std::vector<Session> read_sessions_jsonl(const std::filesystem::path& path) {
  std::vector<Session> sessions;
  for_each_jsonl(path, [&](const Json& row) { sessions.push_back(session_from_json(row)); });
  return sessions;
}

void write_records_jsonl(const std::filesystem::path& path, const std::vector<LogRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

}  // namespace rationlog
