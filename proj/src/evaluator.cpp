#include "rationlog/evaluator.hpp"

#include <iomanip>
#include <sstream>

#include "rationlog/error.hpp"

namespace rationlog {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix accumulate(const std::vector<std::pair<Label, Label>>& pairs) {
  ConfusionMatrix m;
  for (const auto& [predicted, truth] : pairs) {
    if (is_anomalous(truth)) {
      ++(is_anomalous(predicted) ? m.tp : m.fn);
    } else {
      ++(is_anomalous(predicted) ? m.fp : m.tn);
    }
  }
  return m;
}

Prf1 prf1_from_rates(double precision, double recall) {
  const double denom = precision + recall;
  return {precision, recall, denom > 0.0 ? 2.0 * precision * recall / denom : 0.0};
}

Prf1 prf1(const ConfusionMatrix& m) {
  const double p = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  const double r = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  return prf1_from_rates(p, r);
}

ConfusionMatrix evaluate_session(const std::map<SessionId, Label>& predictions,
                                 const std::vector<Session>& sessions) {
  std::vector<std::pair<Label, Label>> pairs;
  pairs.reserve(sessions.size());
  for (const auto& s : sessions) {
    auto it = predictions.find(s.session_id);
    if (it == predictions.end())
      throw Error(ErrorKind::kMissingPrediction, "session " + std::to_string(s.session_id));
    pairs.emplace_back(it->second, s.label);
  }
  return accumulate(pairs);
}

ConfusionMatrix evaluate_template(const std::map<TemplateId, Label>& predictions, const TemplateIndex& index) {
  std::vector<std::pair<Label, Label>> pairs;
  pairs.reserve(index.templates.size());
  for (const auto& t : index.templates) {
    auto it = predictions.find(t.template_id);
    if (it == predictions.end())
      throw Error(ErrorKind::kMissingPrediction, "template " + std::to_string(t.template_id));
    pairs.emplace_back(it->second, t.label);
  }
  return accumulate(pairs);
}

Json metrics_report_json(const std::string& granularity, const ConfusionMatrix& m) {
  const auto s = prf1(m);
  return Json{{"granularity", granularity}, {"precision", s.precision}, {"recall", s.recall},
              {"f1", s.f1},                 {"tp", m.tp},               {"fp", m.fp},
              {"tn", m.tn},                 {"fn", m.fn}};
}

std::string metrics_report_text(const std::string& granularity, const ConfusionMatrix& m) {
  const auto s = prf1(m);
  std::ostringstream os;
  os << std::left << std::setw(12) << "Granularity" << std::right << std::setw(8) << "F1" << std::setw(8)
     << "Pre" << std::setw(8) << "Rec" << std::setw(8) << "TP" << std::setw(8) << "FP" << std::setw(8)
     << "TN" << std::setw(8) << "FN" << '\n';
  os << std::left << std::setw(12) << granularity << std::right << std::fixed << std::setprecision(3)
     << std::setw(8) << s.f1 << std::setw(8) << s.precision << std::setw(8) << s.recall << std::setw(8)
     << m.tp << std::setw(8) << m.fp << std::setw(8) << m.tn << std::setw(8) << m.fn << '\n';
  return os.str();
}

std::map<std::uint64_t, Label> read_predictions_jsonl(const std::filesystem::path& path) {
  std::map<std::uint64_t, Label> out;
  for_each_jsonl(path, [&](const Json& row) {
    const long long id = json_int(row, "id");
    if (id < 0) throw Error(ErrorKind::kSchema, "negative prediction id");
    const char* key = row.contains("label") ? "label" : "verdict";
    auto it = row.find(key);
    if (it == row.end() || it->is_null()) return;
    if (!it->is_string()) throw Error(ErrorKind::kSchema, std::string("'") + key + "' must be a string");
    const auto label = normalize_verdict(it->get<std::string>());
    if (!label) throw Error(ErrorKind::kSchema, "unrecognized verdict '" + it->get<std::string>() + "'");
    out[static_cast<std::uint64_t>(id)] = *label;
  });
  return out;
}

}  // namespace rationlog
