#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"

namespace rationlog {

using SeqIndex = std::uint64_t;

struct LogRecord {
  SeqIndex seq_index = 0;
  std::int64_t timestamp = 0;
  std::string alert_tag;
  std::string content;
  Label label = Label::kNormal;
  std::string source_dataset;

  bool operator==(const LogRecord&) const = default;
};

// Records are kept sorted by (timestamp, seq_index). A Corpus is not mutated
// after construction.
struct Corpus {
  std::string name;
  std::vector<LogRecord> records;

  bool operator==(const Corpus&) const = default;
};

struct LoadResult {
  Corpus corpus;
  std::size_t skipped_count = 0;
};

// Parses one line of the loghub BGL/Spirit layout:
//   <alert_tag> <unix_ts> <date> <node> <fulltime> <node> <subsystem>
//   <component> <severity> <content...>
// A record is Normal iff its alert tag is "-". Throws Error(kTooFewFields) or
// Error(kBadTimestamp).
LogRecord parse_raw_line(std::string_view line, SeqIndex seq_index,
                         std::string_view source_dataset = "");

// Reads a raw log file. seq_index is the 0-based position among parseable
// lines. Malformed lines are counted, not fatal. Throws Error(kIo) and
// Error(kEmptyCorpus).
LoadResult load_corpus(const std::filesystem::path& path, const std::string& name);

// Stable re-sort by (timestamp, seq_index).
void sort_corpus(Corpus& corpus);

// JSONL with keys seq, ts, tag, content, label, src.
Json record_to_json(const LogRecord& record);
LogRecord record_from_json(const Json& row);
void write_corpus_jsonl(const std::filesystem::path& path, const Corpus& corpus);
Corpus read_corpus_jsonl(const std::filesystem::path& path, const std::string& name);

}  // namespace rationlog
