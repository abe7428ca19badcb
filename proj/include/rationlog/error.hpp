#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rationlog {

enum class ErrorKind {
  kTooFewFields,
  kBadTimestamp,
  kIo,
  kEmptyCorpus,
  kMissingSeniorLabel,
  kDegenerateAgreement,
  kStaleEntry,
  kUnknownTemplate,
  kDegenerateSplit,
  kInsufficientPool,
  kVerdictMismatch,
  kTooShort,
  kMissingVerdict,
  kTeacherUnavailable,
  kScorerUnavailable,
  kNonFiniteUpdate,
  kMissingPrediction,
  kInvalidConfig,
  kSchema,
  kPrecondition,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure in the library is reported as an Error; the kind is
// what callers (CLI exit codes, HTTP status mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorKind::kPrecondition, what);
}

}  // namespace rationlog
