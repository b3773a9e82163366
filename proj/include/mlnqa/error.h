#ifndef MLNQA_ERROR_H_
#define MLNQA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlnqa {

enum class ErrorCode {
  kExistentialPresent,
  kOutOfRange,
  kNegativeNonUnitWeight,
  kInvalidProgram,
  kSyntax,
  kSortMismatch,
  kUndeclaredPredicate,
  kUndeclaredConstant,
  kArityMismatch,
  kProbabilityOutOfRange,
  kScoreOutOfRange,
  kDuplicateNode,
  kMissingNode,
  kIllegalRole,
  kUnsupportedExistential,
  kEmptyDomain,
  kHardContradiction,
  kUnsatisfiable,
  kSamplerStuck,
  kTooLarge,
  kAllHardViolated,
  kNoQueryNodes,
  kEmptyKb,
  kAllOptionsTimedOut,
  kTimeout,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Base exception for everything the library reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Location of a parse error. Columns are 1-based, end is exclusive.
struct SourceSpan {
  std::string file;
  int line = 0;
  int column_begin = 0;
  int column_end = 0;

  std::string ToString() const;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, SourceSpan span, const std::string& message)
      : Error(code, span.ToString() + ": " + message), span_(std::move(span)) {}

  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

}  // namespace mlnqa

#endif  // MLNQA_ERROR_H_
