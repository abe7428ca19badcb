#include "rationlog/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <tuple>

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {
namespace {

constexpr std::size_t kMinFields = 10;
constexpr std::size_t kContentStart = 9;

}  // namespace

LogRecord parse_raw_line(std::string_view line, SeqIndex seq_index,
                         std::string_view source_dataset) {
  const auto tokens = split_whitespace(line);
  if (tokens.size() < kMinFields)
    throw Error(ErrorKind::kTooFewFields,
                "expected at least 10 fields, got " + std::to_string(tokens.size()));

  const std::string& ts = tokens[1];
  std::int64_t timestamp = 0;
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), timestamp);
  if (ec != std::errc() || ptr != ts.data() + ts.size())
    throw Error(ErrorKind::kBadTimestamp, "not an integer: '" + ts + "'");

  LogRecord rec;
  rec.seq_index = seq_index;
  rec.timestamp = timestamp;
  rec.alert_tag = tokens[0];
  rec.content = join({tokens.begin() + kContentStart, tokens.end()});
  rec.label = rec.alert_tag == "-" ? Label::kNormal : Label::kAnomalous;
  rec.source_dataset = std::string(source_dataset);
  return rec;
}

void sort_corpus(Corpus& corpus) {
  std::stable_sort(corpus.records.begin(), corpus.records.end(),
                   [](const LogRecord& a, const LogRecord& b) {
                     return std::tie(a.timestamp, a.seq_index) <
                            std::tie(b.timestamp, b.seq_index);
                   });
}

LoadResult load_corpus(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());

  LoadResult result;
  result.corpus.name = name;
  std::string line;
  SeqIndex next = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      result.corpus.records.push_back(parse_raw_line(sanitize_utf8(line), next, name));
      ++next;
    } catch (const Error&) {
      ++result.skipped_count;
    }
  }
  if (in.bad()) throw Error(ErrorKind::kIo, "read failure on " + path.string());
  if (result.corpus.records.empty())
    throw Error(ErrorKind::kEmptyCorpus, "no parseable lines in " + path.string());
  sort_corpus(result.corpus);
  return result;
}

Json record_to_json(const LogRecord& r) {
  return Json{{"seq", r.seq_index},       {"ts", r.timestamp},
              {"tag", r.alert_tag},       {"content", r.content},
              {"label", to_string(r.label)}, {"src", r.source_dataset}};
}

LogRecord record_from_json(const Json& row) {
  LogRecord r;
  const long long seq = json_int(row, "seq");
  if (seq < 0) throw Error(ErrorKind::kSchema, "negative seq");
  r.seq_index = static_cast<SeqIndex>(seq);
  r.timestamp = json_int(row, "ts");
  r.alert_tag = json_string(row, "tag");
  r.content = json_string(row, "content");
  r.label = label_from_string(json_string(row, "label"));
  r.source_dataset = json_string(row, "src");
  return r;
}

void write_corpus_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& r : corpus.records) out << record_to_json(r).dump() << '\n';
}

Corpus read_corpus_jsonl(const std::filesystem::path& path, const std::string& name) {
  Corpus corpus;
  corpus.name = name;
  for_each_jsonl(path, [&](const Json& row) { corpus.records.push_back(record_from_json(row)); });
  if (corpus.records.empty())
    throw Error(ErrorKind::kEmptyCorpus, "no records in " + path.string());
  sort_corpus(corpus);
  return corpus;
}

}  // namespace rationlog
