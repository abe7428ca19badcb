#include "rationlog/cot.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {
namespace {

constexpr std::string_view kVerdictMarker = "verdict:";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

}  // namespace

std::size_t sentence_terminators(std::string_view text) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == text.size();
    if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) ++count;
  }
  return count;
}

std::string escape_log_text(std::string_view log_text) {
  std::string s(log_text);
  replace_all(s, "\\", "\\\\");
  replace_all(s, "</log>", "<\\/log>");
  replace_all(s, "<log>", "<\\log>");
  return s;
}

std::string build_prompt(std::string_view log_text, Label label) {
  require(!trim(log_text).empty(), "build_prompt needs a non-empty log");
  const std::string verdict = is_anomalous(label) ? "abnormal" : "normal";
  std::string prompt;
  prompt +=
      "You are a senior site reliability engineer reviewing supercomputer system logs.\n"
      "Analyze the log line between the <log> and </log> markers step by step, in exactly three phases:\n"
      "1. Key parameters: identify the component, the event and every parameter in the message.\n"
      "2. Implications: reason about what these parameters imply for the health of the system.\n"
      "3. Conclusion: state whether the event indicates a failure.\n"
      "Write each phase as complete sentences. End your reply with a final line of the form\n"
      "\"Verdict: " + verdict + "\".\n\n"
      "<log>\n";
  prompt += escape_log_text(log_text);
  prompt += "\n</log>\n";
  return prompt;
}

CotTriplet parse_teacher_response(std::string_view raw, Label expected_label, std::string_view log_text) {
  require(!trim(raw).empty(), "empty teacher response");
  const std::string lowered = to_lower(raw);
  const auto marker = lowered.rfind(kVerdictMarker);
  if (marker == std::string::npos) throw Error(ErrorKind::kMissingVerdict, "no 'Verdict:' line");

  std::string verdict_text(raw.substr(marker + kVerdictMarker.size()));
  if (auto nl = verdict_text.find('\n'); nl != std::string::npos) verdict_text.resize(nl);
  verdict_text = trim(verdict_text);
  while (!verdict_text.empty() && (verdict_text.back() == '*' || verdict_text.back() == '"'))
    verdict_text.pop_back();
  while (!verdict_text.empty() && (verdict_text.front() == '*' || verdict_text.front() == '"'))
    verdict_text.erase(verdict_text.begin());
  const auto verdict = normalize_verdict(verdict_text);
  if (!verdict) throw Error(ErrorKind::kMissingVerdict, "unrecognized verdict '" + verdict_text + "'");
  if (*verdict != expected_label)
    throw Error(ErrorKind::kVerdictMismatch, "teacher said " + std::string(to_string(*verdict)) +
                                                 ", expected " + std::string(to_string(expected_label)));

  CotTriplet t;
  t.log_text = std::string(log_text);
  t.cot_analysis = trim(raw.substr(0, marker));
  t.label = expected_label;
  validate_triplet(t);
  return t;
}

void validate_triplet(const CotTriplet& t) {
  if (trim(t.log_text).empty()) throw Error(ErrorKind::kSchema, "triplet log is empty");
  if (trim(t.cot_analysis).empty()) throw Error(ErrorKind::kTooShort, "analysis is empty");
  if (sentence_terminators(t.cot_analysis) < 2)
    throw Error(ErrorKind::kTooShort, "analysis has fewer than two sentences");
}

LengthStats length_stats(const std::vector<CotTriplet>& triplets) {
  require(!triplets.empty(), "length_stats needs at least one triplet");
  double sum = 0.0;
  std::vector<double> lengths;
  lengths.reserve(triplets.size());
  for (const auto& t : triplets) {
    lengths.push_back(static_cast<double>(split_whitespace(t.cot_analysis).size()));
    sum += lengths.back();
  }
  const double n = static_cast<double>(lengths.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double l : lengths) sq += (l - mean) * (l - mean);
  return LengthStats{mean, std::sqrt(sq / n), triplets.size()};
}

Json triplet_to_json(const CotTriplet& t) {
  return Json{{"log", t.log_text}, {"cot", t.cot_analysis}, {"label", to_string(t.label)}};
}

CotTriplet triplet_from_json(const Json& row) {
  CotTriplet t{json_string(row, "log"), json_string(row, "cot"), label_from_string(json_string(row, "label"))};
  validate_triplet(t);
  return t;
}

std::vector<CotTriplet> read_triplets_jsonl(const std::filesystem::path& path) {
  std::vector<CotTriplet> out;
  for_each_jsonl(path, [&](const Json& row) { out.push_back(triplet_from_json(row)); });
  return out;
}

void write_triplets_jsonl(const std::filesystem::path& path, const std::vector<CotTriplet>& triplets) {
  std::vector<Json> rows;
  for (const auto& t : triplets) rows.push_back(triplet_to_json(t));
  write_jsonl(path, rows);
}

TeacherConfig teacher_config_from_env(TeacherConfig base) {
  if (const char* key = std::getenv("TEACHER_API_KEY"); key && *key) base.api_key = key;
  return base;
}

Json chat_request_body(const TeacherConfig& cfg, std::string_view prompt) {
  return Json{{"model", cfg.model},
              {"temperature", cfg.temperature},
              {"messages", Json::array({Json{{"role", "user"}, {"content", std::string(prompt)}}})}};
}

std::string chat_response_content(const Json& body) {
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed chat-completion response: ") + e.what());
  }
}

TeacherFn http_teacher(const TeacherConfig& cfg) {
  require(!cfg.base_url.empty(), "teacher base_url is empty");
  require(cfg.max_attempts >= 1, "teacher max_attempts must be >= 1");
  return [cfg](const std::string& prompt) -> std::string {
    httplib::Client client(cfg.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
    const std::string body = chat_request_body(cfg, prompt).dump();

    std::string last_error;
    auto delay = cfg.backoff;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
      auto res = client.Post(cfg.path, headers, body, "application/json");
      if (res && res->status >= 200 && res->status < 300) {
        try {
          return chat_response_content(Json::parse(res->body));
        } catch (const Json::parse_error& e) {
          last_error = std::string("unparseable body: ") + e.what();
        } catch (const Error& e) {
          last_error = e.what();
        }
      } else {
        last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
      }
      if (attempt < cfg.max_attempts) {
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
    }
    throw Error(ErrorKind::kTeacherUnavailable,
                "teacher failed after " + std::to_string(cfg.max_attempts) + " attempts: " + last_error);
  };
}

DistillSummary distill(const std::vector<DistillItem>& items, const TeacherFn& teacher,
                       unsigned parallelism, const std::function<void(const CotTriplet&)>& on_triplet) {
  DistillSummary summary;
  std::vector<std::optional<CotTriplet>> slots(items.size());
  std::atomic<std::size_t> next{0}, requested{0}, rerequested{0};
  std::mutex mu;
  std::exception_ptr fatal;

  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const auto& item = items[i];
      const std::string prompt = build_prompt(item.log_text, item.label);
      std::string reason;
      for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) ++rerequested;
        ++requested;
        try {
          CotTriplet t = parse_teacher_response(teacher(prompt), item.label, item.log_text);
          std::lock_guard lock(mu);
          if (on_triplet) on_triplet(t);
          slots[i] = std::move(t);
          break;
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::kTeacherUnavailable) {
            std::lock_guard lock(mu);
            if (!fatal) fatal = std::current_exception();
            next = items.size();
            return;
          }
          reason = e.what();
        }
      }
      if (!slots[i]) {
        std::lock_guard lock(mu);
        summary.drop_reasons.push_back("item " + std::to_string(i) + ": " + reason);
      }
    }
  };

  {
    std::vector<std::jthread> workers;
    const unsigned n = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(items.size())));
    for (unsigned w = 0; w < n; ++w) workers.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);

  summary.requested = requested;
  summary.rerequested = rerequested;
  for (auto& slot : slots) {
    if (slot) {
      summary.triplets.push_back(std::move(*slot));
    } else {
      ++summary.dropped;
    }
  }
  return summary;
}

}  // namespace rationlog
