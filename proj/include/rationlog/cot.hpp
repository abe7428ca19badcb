#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"
#include "rationlog/length_stats.hpp"

namespace rationlog {

struct CotTriplet {
  std::string log_text;
  std::string cot_analysis;
  Label label = Label::kNormal;

  bool operator==(const CotTriplet&) const = default;
};

// Count of '.', '!' or '?' that end a sentence (followed by whitespace or the
// end of text), so "core.2275" does not count.
std::size_t sentence_terminators(std::string_view text);

// Escapes backslashes and the <log>/</log> delimiters so that distinct logs
// always produce distinct prompts.
std::string escape_log_text(std::string_view log_text);

// Teacher instruction: three phases (key parameters, implications,
// conclusion), closing with "Verdict: <normal|abnormal>" matching `label`.
std::string build_prompt(std::string_view log_text, Label label);

// Splits on the last "verdict:" marker (case-insensitive). Errors:
// kMissingVerdict, kVerdictMismatch, kTooShort (fewer than two sentences).
CotTriplet parse_teacher_response(std::string_view raw, Label expected_label, std::string_view log_text);

// Re-checks a stored triplet against the same filters.
void validate_triplet(const CotTriplet& triplet);

// Whitespace-token counts of the analyses; population standard deviation.
LengthStats length_stats(const std::vector<CotTriplet>& triplets);

Json triplet_to_json(const CotTriplet& t);
CotTriplet triplet_from_json(const Json& row);
std::vector<CotTriplet> read_triplets_jsonl(const std::filesystem::path& path);
void write_triplets_jsonl(const std::filesystem::path& path, const std::vector<CotTriplet>& triplets);

struct TeacherConfig {
  std::string base_url;  // e.g. http://localhost:8000
  std::string model = "teacher";
  std::string api_key;   // sent as a bearer token when non-empty
  std::string path = "/v1/chat/completions";
  double temperature = 0.2;
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
};

// Reads TEACHER_API_KEY into the config when set.
TeacherConfig teacher_config_from_env(TeacherConfig base);

// Request body in the chat-completion schema.
Json chat_request_body(const TeacherConfig& cfg, std::string_view prompt);
// choices[0].message.content; Error(kSchema) otherwise.
std::string chat_response_content(const Json& body);

// Returns the teacher's completion text. Transport failures and non-2xx
// replies are retried with exponential backoff; after max_attempts the call
// fails with Error(kTeacherUnavailable).
using TeacherFn = std::function<std::string(const std::string& prompt)>;
TeacherFn http_teacher(const TeacherConfig& cfg);

struct DistillItem {
  std::string log_text;
  Label label = Label::kNormal;
};

struct DistillSummary {
  std::vector<CotTriplet> triplets;  // input order, dropped items omitted
  std::size_t requested = 0;
  std::size_t rerequested = 0;
  std::size_t dropped = 0;
  std::vector<std::string> drop_reasons;
};

// Asks the teacher for every item with at most `parallelism` requests in
// flight. A response failing the filters is re-requested once, then dropped.
// `on_triplet` (optional) is invoked under a single lock, in completion order.
DistillSummary distill(const std::vector<DistillItem>& items, const TeacherFn& teacher,
                       unsigned parallelism = 4,
                       const std::function<void(const CotTriplet&)>& on_triplet = {});

}  // namespace rationlog
