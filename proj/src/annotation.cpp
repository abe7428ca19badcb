#include "rationlog/annotation.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "rationlog/error.hpp"

namespace rationlog {

std::string_view to_string(ResolvedBy r) {
  switch (r) {
    case ResolvedBy::kUnanimous: return "Unanimous";
    case ResolvedBy::kPanelConsensus: return "PanelConsensus";
    case ResolvedBy::kSeniorOverride: return "SeniorOverride";
  }
  return "";
}

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kSystemError: return "SystemError";
    case ErrorCategory::kNetworkIssue: return "NetworkIssue";
    case ErrorCategory::kHardwareFailure: return "HardwareFailure";
    case ErrorCategory::kSoftwareException: return "SoftwareException";
    case ErrorCategory::kOther: return "Other";
  }
  return "";
}

ResolvedBy resolved_by_from_string(std::string_view s) {
  for (auto r : {ResolvedBy::kUnanimous, ResolvedBy::kPanelConsensus, ResolvedBy::kSeniorOverride})
    if (to_string(r) == s) return r;
  throw Error(ErrorKind::kSchema, "unknown resolved_by '" + std::string(s) + "'");
}

ErrorCategory category_from_string(std::string_view s) {
  for (auto c : {ErrorCategory::kSystemError, ErrorCategory::kNetworkIssue,
                 ErrorCategory::kHardwareFailure, ErrorCategory::kSoftwareException,
                 ErrorCategory::kOther})
    if (to_string(c) == s) return c;
  throw Error(ErrorKind::kSchema, "unknown category '" + std::string(s) + "'");
}

void CorrectionEntry::validate() const {
  if (old_label == new_label)
    throw Error(ErrorKind::kSchema,
                "correction for template " + std::to_string(template_id) + " does not change the label");
  if (category == ErrorCategory::kOther && new_label != Label::kNormal)
    throw Error(ErrorKind::kSchema, "category Other is reserved for corrections towards normal");
}

Resolution resolve(const std::vector<ReviewVote>& votes, std::optional<Label> senior_label) {
  require(votes.size() >= 2, "resolve needs at least two votes");
  std::set<std::string> annotators;
  std::size_t anomalous = 0;
  for (const auto& v : votes) {
    require(v.template_id == votes.front().template_id, "votes span several templates");
    require(annotators.insert(v.annotator_id).second, "duplicate vote by " + v.annotator_id);
    if (is_anomalous(v.label)) ++anomalous;
  }
  const std::size_t normal = votes.size() - anomalous;
  if (anomalous == 0) return {Label::kNormal, ResolvedBy::kUnanimous};
  if (normal == 0) return {Label::kAnomalous, ResolvedBy::kUnanimous};
  if (anomalous != normal)
    return {anomalous > normal ? Label::kAnomalous : Label::kNormal, ResolvedBy::kPanelConsensus};
  if (!senior_label)
    throw Error(ErrorKind::kMissingSeniorLabel,
                "tied vote on template " + std::to_string(votes.front().template_id));
  return {*senior_label, ResolvedBy::kSeniorOverride};
}

void AgreementMatrix::validate() const {
  require(n_annotators >= 2, "agreement needs at least two annotators");
  require(items.size() >= 2, "agreement needs at least two items");
  for (const auto& item : items)
    require(item.n_normal >= 0 && item.n_anomalous >= 0 &&
                item.n_normal + item.n_anomalous == n_annotators,
            "item vote counts must sum to n_annotators");
}

AgreementMatrix agreement_matrix(const std::vector<ReviewVote>& votes) {
  std::map<TemplateId, std::vector<const ReviewVote*>> grouped;
  for (const auto& v : votes) grouped[v.template_id].push_back(&v);
  AgreementMatrix m;
  for (const auto& [id, group] : grouped) {
    std::set<std::string> seen;
    AgreementItem item;
    for (const auto* v : group) {
      require(seen.insert(v->annotator_id).second,
              "duplicate vote by " + v->annotator_id + " on template " + std::to_string(id));
      (is_anomalous(v->label) ? item.n_anomalous : item.n_normal) += 1;
    }
    const int n = item.n_normal + item.n_anomalous;
    if (m.items.empty()) m.n_annotators = n;
    require(n == m.n_annotators, "template " + std::to_string(id) + " has an unequal number of raters");
    m.items.push_back(item);
  }
  return m;
}

double fleiss_kappa(const AgreementMatrix& matrix) {
  matrix.validate();
  const double n = matrix.n_annotators;
  const double items = static_cast<double>(matrix.items.size());
  double p_bar = 0.0, total_normal = 0.0, total_anomalous = 0.0;
  for (const auto& item : matrix.items) {
    const double a = item.n_normal, b = item.n_anomalous;
    p_bar += (a * a + b * b - n) / (n * (n - 1.0));
    total_normal += a;
    total_anomalous += b;
  }
  p_bar /= items;
  const double p_normal = total_normal / (items * n);
  const double p_anomalous = total_anomalous / (items * n);
  const double p_chance = p_normal * p_normal + p_anomalous * p_anomalous;
  if (p_chance == 1.0) {
    if (p_bar == 1.0) return 1.0;
    throw Error(ErrorKind::kDegenerateAgreement, "chance agreement is 1");
  }
  if (p_bar == 1.0) return 1.0;
  return (p_bar - p_chance) / (1.0 - p_chance);
}

TemplateIndex apply_corrections(const TemplateIndex& index, const std::vector<CorrectionEntry>& ledger) {
  TemplateIndex out = index;
  for (const auto& entry : ledger) {
    entry.validate();
    LogTemplate* t = out.find(entry.template_id);
    if (!t) throw Error(ErrorKind::kUnknownTemplate, "template " + std::to_string(entry.template_id));
    if (t->label != entry.old_label)
      throw Error(ErrorKind::kStaleEntry, "template " + std::to_string(entry.template_id) + " is " +
                                              std::string(to_string(t->label)) + ", entry expects " +
                                              std::string(to_string(entry.old_label)));
    t->label = entry.new_label;
  }
  return out;
}

namespace {

constexpr std::string_view kToAnomalous = "normal->anomalous";
constexpr std::string_view kToNormal = "anomalous->normal";

double one_decimal_percent(std::size_t count, std::size_t total) {
  return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(total)) / 10.0;
}

}  // namespace

CorrectionReport correction_report(const std::vector<CorrectionEntry>& ledger) {
  require(!ledger.empty(), "correction_report needs a non-empty ledger");
  static constexpr ErrorCategory kOrder[] = {ErrorCategory::kSystemError, ErrorCategory::kNetworkIssue,
                                             ErrorCategory::kHardwareFailure,
                                             ErrorCategory::kSoftwareException};
  std::map<ErrorCategory, std::size_t> to_anomalous;
  std::size_t to_normal = 0;
  for (const auto& e : ledger) {
    e.validate();
    if (e.new_label == Label::kNormal) {
      ++to_normal;
    } else {
      ++to_anomalous[e.category];
    }
  }
  CorrectionReport report;
  report.total = ledger.size();
  for (auto c : kOrder) {
    auto it = to_anomalous.find(c);
    if (it == to_anomalous.end()) continue;
    report.rows.push_back({std::string(kToAnomalous), c, it->second, one_decimal_percent(it->second, report.total)});
  }
  if (to_normal > 0)
    report.rows.push_back({std::string(kToNormal), std::nullopt, to_normal, one_decimal_percent(to_normal, report.total)});
  return report;
}

std::string render_report_text(const CorrectionReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(20) << "Correction" << std::setw(20) << "Error Category"
     << std::right << std::setw(8) << "Count" << std::setw(12) << "Percentage" << '\n';
  os << std::string(60, '-') << '\n';
  os << std::fixed << std::setprecision(1);
  for (const auto& row : report.rows) {
    os << std::left << std::setw(20) << row.direction << std::setw(20)
       << (row.category ? std::string(to_string(*row.category)) : std::string("-")) << std::right
       << std::setw(8) << row.count << std::setw(11) << row.percentage << "%\n";
  }
  os << std::string(60, '-') << '\n';
  os << std::left << std::setw(20) << "Total" << std::setw(20) << "-" << std::right << std::setw(8)
     << report.total << std::setw(11) << report.total_percentage << "%\n";
  return os.str();
}

Json report_to_json(const CorrectionReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"direction", row.direction},
                    {"category", row.category ? Json(to_string(*row.category)) : Json(nullptr)},
                    {"count", row.count},
                    {"percentage", row.percentage}});
  return Json{{"rows", rows}, {"total", report.total}, {"total_percentage", report.total_percentage}};
}

Json correction_to_json(const CorrectionEntry& e) {
  return Json{{"template_id", e.template_id},       {"old", to_string(e.old_label)},
              {"new", to_string(e.new_label)},       {"category", to_string(e.category)},
              {"rationale", e.rationale},            {"resolved_by", to_string(e.resolved_by)}};
}

CorrectionEntry correction_from_json(const Json& row) {
  CorrectionEntry e;
  const long long id = json_int(row, "template_id");
  if (id < 0) throw Error(ErrorKind::kSchema, "negative template_id");
  e.template_id = static_cast<TemplateId>(id);
  e.old_label = label_from_string(json_string(row, "old"));
  e.new_label = label_from_string(json_string(row, "new"));
  e.category = category_from_string(json_string(row, "category"));
  e.rationale = row.contains("rationale") ? json_string(row, "rationale") : std::string();
  e.resolved_by = resolved_by_from_string(json_string(row, "resolved_by"));
  e.validate();
  return e;
}

std::vector<CorrectionEntry> read_ledger_jsonl(const std::filesystem::path& path) {
  std::vector<CorrectionEntry> ledger;
  for_each_jsonl(path, [&](const Json& row) { ledger.push_back(correction_from_json(row)); });
  return ledger;
}

void write_ledger_jsonl(const std::filesystem::path& path, const std::vector<CorrectionEntry>& ledger) {
  std::vector<Json> rows;
  for (const auto& e : ledger) rows.push_back(correction_to_json(e));
  write_jsonl(path, rows);
}

}  // namespace rationlog
