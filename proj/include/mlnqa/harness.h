#ifndef MLNQA_HARNESS_H_
#define MLNQA_HARNESS_H_

// Multiple-choice question answering over a KB of rule graphs: rule
// selection, per-option encoding and inference, chaining and exam scoring.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlnqa/encoders.h"
#include "mlnqa/ground_network.h"
#include "mlnqa/inference.h"
#include "mlnqa/parser.h"

namespace mlnqa {

struct MultipleChoiceQuestion {
  std::string id;
  QuestionGraph setup;
  std::vector<OptionGraph> options;
  std::optional<size_t> correct;  // 0-based
};

/// Needs a question block and at least two option blocks.
MultipleChoiceQuestion QuestionFromDocument(const QgDocument& doc, std::string id);

/// `<question-id> <1-based option index>` per line.
std::map<std::string, size_t> ParseAnswerKey(std::string_view text);

/// Every *.qg file in `dir`, ordered by file name and identified by its stem,
/// with answers from `dir/key.txt` when present.
std::vector<MultipleChoiceQuestion> LoadQuestionDirectory(const std::filesystem::path& dir);

/// The setup graph plus one option's query nodes and edges.
QuestionGraph OptionQuestion(const MultipleChoiceQuestion& q, size_t option);

std::set<std::string> GraphTokens(const LabeledGraph& g);

/// |tokens(rule) ∩ tokens| / |tokens(rule)|.
double RuleOverlap(const KbRuleGraph& rule, const std::set<std::string>& tokens);

/// Indices into `kb`, best first, ties by rule id; at most k. Throws EmptyKb.
std::vector<size_t> RankRules(const std::set<std::string>& tokens,
                              const std::vector<KbRuleGraph>& kb, size_t k);

/// Ranks against the tokens of the setup and every option.
std::vector<size_t> SelectRules(const MultipleChoiceQuestion& q,
                                const std::vector<KbRuleGraph>& kb, size_t k = 30);

struct HarnessConfig {
  Formulation formulation = Formulation::kPraline;
  EncoderOptions encoder;
  McSatConfig mcsat;
  size_t top_k = 30;
  size_t rules_per_option = 1;
  double total_timeout_s = 600.0;
  double grounding_timeout_s = 360.0;
  double tie_epsilon = 1e-4;
  double promotion_threshold = 0.6;
  double alignment_threshold = 0.5;
  int chain_depth = 1;
  uint64_t seed = 1;
  int threads = 1;
};

struct OptionResult {
  std::string name;
  /// -infinity when the option timed out.
  double probability = 0.0;
  bool timed_out = false;
  std::vector<std::string> rules;
  GroundStats stats;
  double ms = 0.0;
  /// Marginals of holds and aligns atoms (Praline only).
  std::map<GroundAtom, double> marginals;
};

struct QuestionResult {
  std::string id;
  std::vector<OptionResult> options;
  std::vector<size_t> chosen;
  std::optional<size_t> correct;
  double credit = 0.0;
  double ms = 0.0;
  std::string error;
};

struct ExamReport {
  std::vector<QuestionResult> questions;
  double score = 0.0;  // percent
};

/// Encode, ground with backbone reduction, and estimate Pr[result()].
OptionResult EvaluateOption(const QuestionGraph& question, const std::vector<KbRuleGraph>& rules,
                            const EntailmentTable& table, const HarnessConfig& config,
                            uint64_t seed);

/// Options whose probability is within `epsilon` of the best finished one.
std::vector<size_t> ChosenOptions(const std::vector<double>& probabilities, double epsilon);

/// 1 for a unique correct argmax, 1/k for a k-way tie containing it, else 0.
double Credit(const std::vector<double>& probabilities, size_t correct, double epsilon);

/// One option per true/false question, each with its most promising rules.
/// Throws AllOptionsTimedOut.
QuestionResult AnswerQuestion(const MultipleChoiceQuestion& q, const std::vector<KbRuleGraph>& kb,
                              const EntailmentTable& table, const HarnessConfig& config,
                              uint64_t seed);

/// Incremental rule selection for Praline; depth 1 is AnswerQuestion.
QuestionResult ChainInference(const MultipleChoiceQuestion& q, const std::vector<KbRuleGraph>& kb,
                              const EntailmentTable& table, const HarnessConfig& config,
                              int depth, uint64_t seed);

/// Fills chosen options and credit. Throws OutOfRange for a question
/// without a correct index.
ExamReport ScoreExam(std::vector<QuestionResult> results, double epsilon = 1e-4);

/// Questions run on `config.threads` workers with seed = config.seed + index.
ExamReport RunExam(const std::vector<MultipleChoiceQuestion>& questions,
                   const std::vector<KbRuleGraph>& kb, const EntailmentTable& table,
                   const HarnessConfig& config);

/// Human-readable report, including timings.
std::string FormatReport(const ExamReport& report);

/// Tab-separated summary, one line per question, without timings.
std::string FormatSummary(const ExamReport& report);

}  // namespace mlnqa

#endif  // MLNQA_HARNESS_H_
