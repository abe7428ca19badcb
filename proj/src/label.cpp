#include "rationlog/label.hpp"

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {

std::string_view to_string(Label label) {
  return label == Label::kNormal ? "normal" : "anomalous";
}

Label label_from_string(std::string_view text) {
  if (text == "normal") return Label::kNormal;
  if (text == "anomalous") return Label::kAnomalous;
  throw Error(ErrorKind::kSchema, "unknown label '" + std::string(text) + "'");
}

std::optional<Label> normalize_verdict(std::string_view text) {
  std::string v = to_lower(trim(text));
  if (!v.empty() && v.back() == '.') v.pop_back();
  if (v == "normal") return Label::kNormal;
  if (v == "abnormal" || v == "anomalous" || v == "anomaly") return Label::kAnomalous;
  return std::nullopt;
}

}  // namespace rationlog
