#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "rationlog/corpus.hpp"
#include "rationlog/jsonl.hpp"
#include "rationlog/template_miner.hpp"

namespace rationlog {

using SessionId = std::uint64_t;

struct Session {
  SessionId session_id = 0;
  std::vector<SeqIndex> record_refs;
  Label label = Label::kNormal;

  bool operator==(const Session&) const = default;
};

enum class PoolMode {
  kRecord,    // every record, with its own (corrected) label
  kTemplate,  // first record of each template, labeled with the template label
};

std::string_view to_string(PoolMode mode);
PoolMode pool_mode_from_string(std::string_view s);

struct SplitSpec {
  double train_fraction = 0.8;
  std::size_t template_train_size = 2000;
  double anomaly_rate = 0.15;
  std::size_t window_size = 100;
  std::size_t test_size = 8000;
  std::uint64_t rng_seed = 0;
  PoolMode pool_mode = PoolMode::kRecord;

  void validate() const;
};

struct PoolItem {
  LogRecord record;
  Label label = Label::kNormal;
};

// First ceil(n * train_fraction) records train, the rest test.
// Error(kDegenerateSplit) if either side would be empty.
std::pair<Corpus, Corpus> chronological_split(const Corpus& corpus, double train_fraction);

std::vector<PoolItem> build_pool(const Corpus& corpus, const TemplateIndex& index, PoolMode mode);

// Exactly round(size * anomaly_rate) anomalous and the rest normal records,
// drawn without replacement and then shuffled, all from one seeded stream.
// Returned records carry the pool label.
std::vector<LogRecord> sample_template_set(const std::vector<PoolItem>& pool, std::size_t size,
                                           double anomaly_rate, std::uint64_t rng_seed);

// Consecutive non-overlapping windows; a trailing partial window is kept.
std::vector<Session> build_sessions(const std::vector<LogRecord>& records, std::size_t window_size);

// Drops every session touching a training record.
std::vector<Session> exclude_leakage(const std::vector<Session>& sessions,
                                     const std::set<SeqIndex>& train_records);

// Copies the corrected template labels down to member records, for templates
// whose label differs between the two indexes.
Corpus relabel_records(const Corpus& corpus, const TemplateIndex& original,
                       const TemplateIndex& corrected);

// Order-sensitive digest over the canonical JSONL rendering.
std::string partition_digest(const std::vector<LogRecord>& records);

Json session_to_json(const Session& s);
Session session_from_json(const Json& row);
void write_sessions_jsonl(const std::filesystem::path& path, const std::vector<Session>& sessions);
std::vector<Session> read_sessions_jsonl(const std::filesystem::path& path);

void write_records_jsonl(const std::filesystem::path& path, const std::vector<LogRecord>& records);

}  // namespace rationlog
