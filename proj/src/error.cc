#include "mlnqa/error.h"

namespace mlnqa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kExistentialPresent: return "ExistentialPresent";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNegativeNonUnitWeight: return "NegativeNonUnitWeight";
    case ErrorCode::kInvalidProgram: return "InvalidProgram";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kSortMismatch: return "SortMismatch";
    case ErrorCode::kUndeclaredPredicate: return "UndeclaredPredicate";
    case ErrorCode::kUndeclaredConstant: return "UndeclaredConstant";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kMissingNode: return "MissingNode";
    case ErrorCode::kIllegalRole: return "IllegalRole";
    case ErrorCode::kUnsupportedExistential: return "UnsupportedExistential";
    case ErrorCode::kEmptyDomain: return "EmptyDomain";
    case ErrorCode::kHardContradiction: return "HardContradiction";
    case ErrorCode::kUnsatisfiable: return "Unsatisfiable";
    case ErrorCode::kSamplerStuck: return "SamplerStuck";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kAllHardViolated: return "AllHardViolated";
    case ErrorCode::kNoQueryNodes: return "NoQueryNodes";
    case ErrorCode::kEmptyKb: return "EmptyKb";
    case ErrorCode::kAllOptionsTimedOut: return "AllOptionsTimedOut";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

std::string SourceSpan::ToString() const {
  std::string out = file.empty() ? "<input>" : file;
  out += ":" + std::to_string(line) + ":" + std::to_string(column_begin);
  if (column_end > column_begin + 1)
    out += "-" + std::to_string(column_end - 1);
  return out;
}

}  // namespace mlnqa
