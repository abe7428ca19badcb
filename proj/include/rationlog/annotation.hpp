#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"
#include "rationlog/template_miner.hpp"

namespace rationlog {

struct ReviewVote {
  TemplateId template_id = 0;
  std::string annotator_id;
  Label label = Label::kNormal;
};

enum class ResolvedBy { kUnanimous, kPanelConsensus, kSeniorOverride };

enum class ErrorCategory {
  kSystemError,
  kNetworkIssue,
  kHardwareFailure,
  kSoftwareException,
  kOther,
};

std::string_view to_string(ResolvedBy r);
std::string_view to_string(ErrorCategory c);
ResolvedBy resolved_by_from_string(std::string_view s);
ErrorCategory category_from_string(std::string_view s);

struct CorrectionEntry {
  TemplateId template_id = 0;
  Label old_label = Label::kNormal;
  Label new_label = Label::kAnomalous;
  ErrorCategory category = ErrorCategory::kOther;
  std::string rationale;
  ResolvedBy resolved_by = ResolvedBy::kUnanimous;

  // old != new; category Other only on corrections towards Normal.
  void validate() const;
};

struct Resolution {
  Label label;
  ResolvedBy resolved_by;
};

// Unanimous -> that label; strict majority -> majority label via panel;
// exact tie -> senior_label (Error(kMissingSeniorLabel) when absent).
Resolution resolve(const std::vector<ReviewVote>& votes, std::optional<Label> senior_label = {});

struct AgreementItem {
  int n_normal = 0;
  int n_anomalous = 0;
};

struct AgreementMatrix {
  std::vector<AgreementItem> items;
  int n_annotators = 0;

  void validate() const;
};

// Groups votes per template; every template must be rated by the same number
// of annotators and no annotator may vote twice on one template.
AgreementMatrix agreement_matrix(const std::vector<ReviewVote>& votes);

// Fleiss' kappa over the two-category rating matrix. When all votes fall in a
// single category the chance term is 1; that input yields 1.0 if every item is
// unanimous and Error(kDegenerateAgreement) otherwise.
double fleiss_kappa(const AgreementMatrix& matrix);

// Applies ledger entries in order to a copy of the index.
TemplateIndex apply_corrections(const TemplateIndex& index, const std::vector<CorrectionEntry>& ledger);

struct ReportRow {
  std::string direction;
  std::optional<ErrorCategory> category;
  std::size_t count = 0;
  double percentage = 0.0;
};

struct CorrectionReport {
  std::vector<ReportRow> rows;  // non-empty groups, in table order
  std::size_t total = 0;
  double total_percentage = 100.0;
};

// Percentages are count/total rounded to one decimal place.
CorrectionReport correction_report(const std::vector<CorrectionEntry>& ledger);
std::string render_report_text(const CorrectionReport& report);
Json report_to_json(const CorrectionReport& report);

Json correction_to_json(const CorrectionEntry& entry);
CorrectionEntry correction_from_json(const Json& row);
std::vector<CorrectionEntry> read_ledger_jsonl(const std::filesystem::path& path);
void write_ledger_jsonl(const std::filesystem::path& path, const std::vector<CorrectionEntry>& ledger);

}  // namespace rationlog
