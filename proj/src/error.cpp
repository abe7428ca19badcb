#include "rationlog/error.hpp"

namespace rationlog {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooFewFields: return "TooFewFields";
    case ErrorKind::kBadTimestamp: return "BadTimestamp";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kMissingSeniorLabel: return "MissingSeniorLabel";
    case ErrorKind::kDegenerateAgreement: return "DegenerateAgreement";
    case ErrorKind::kStaleEntry: return "StaleEntry";
    case ErrorKind::kUnknownTemplate: return "UnknownTemplate";
    case ErrorKind::kDegenerateSplit: return "DegenerateSplit";
    case ErrorKind::kInsufficientPool: return "InsufficientPool";
    case ErrorKind::kVerdictMismatch: return "VerdictMismatch";
    case ErrorKind::kTooShort: return "TooShort";
    case ErrorKind::kMissingVerdict: return "MissingVerdict";
    case ErrorKind::kTeacherUnavailable: return "TeacherUnavailable";
    case ErrorKind::kScorerUnavailable: return "ScorerUnavailable";
    case ErrorKind::kNonFiniteUpdate: return "NonFiniteUpdate";
    case ErrorKind::kMissingPrediction: return "MissingPrediction";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kSchema: return "SchemaError";
    case ErrorKind::kPrecondition: return "PreconditionViolation";
  }
  return "Unknown";
}

}  // namespace rationlog
