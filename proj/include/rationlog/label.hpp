#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rationlog {

enum class Label { kNormal, kAnomalous };

// "normal" / "anomalous"
std::string_view to_string(Label label);

// Accepts only the canonical serialized forms.
Label label_from_string(std::string_view text);

// Maps a free-text verdict (case-insensitive, surrounding whitespace and a
// trailing period ignored) onto a Label: "normal" -> Normal;
// "abnormal" / "anomalous" / "anomaly" -> Anomalous. Anything else is nullopt.
std::optional<Label> normalize_verdict(std::string_view text);

inline bool is_anomalous(Label label) { return label == Label::kAnomalous; }

}  // namespace rationlog
