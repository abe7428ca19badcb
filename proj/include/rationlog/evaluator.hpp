#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rationlog/dataset.hpp"
#include "rationlog/jsonl.hpp"
#include "rationlog/label.hpp"
#include "rationlog/template_miner.hpp"

namespace rationlog {

// Anomalous is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// pairs are (predicted, truth)
ConfusionMatrix accumulate(const std::vector<std::pair<Label, Label>>& pairs);

// 0/0 evaluates to 0.
Prf1 prf1(const ConfusionMatrix& m);
Prf1 prf1_from_rates(double precision, double recall);

// Error(kMissingPrediction) naming the first uncovered id.
ConfusionMatrix evaluate_session(const std::map<SessionId, Label>& predictions,
                                 const std::vector<Session>& sessions);
ConfusionMatrix evaluate_template(const std::map<TemplateId, Label>& predictions, const TemplateIndex& index);

// {granularity, precision, recall, f1, tp, fp, tn, fn}
Json metrics_report_json(const std::string& granularity, const ConfusionMatrix& m);
// Columns in F1, Pre, Rec order.
std::string metrics_report_text(const std::string& granularity, const ConfusionMatrix& m);

// JSONL rows {"id": n, "label": "..."}; rows without "label" fall back to
// "verdict" (score output). A null or absent verdict leaves the id uncovered.
std::map<std::uint64_t, Label> read_predictions_jsonl(const std::filesystem::path& path);

}  // namespace rationlog
