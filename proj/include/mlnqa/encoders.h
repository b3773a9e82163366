#ifndef MLNQA_ENCODERS_H_
#define MLNQA_ENCODERS_H_

// Compile a question graph, KB rule graphs and an entailment table into an
// MLN program under one of three formulations.

#include <string>
#include <string_view>
#include <vector>

#include "mlnqa/entailment.h"
#include "mlnqa/graph.h"
#include "mlnqa/logic.h"

namespace mlnqa {

enum class Formulation { kFirstOrder, kEntityResolution, kPraline };

std::string_view FormulationName(Formulation f);
/// Accepts "fo", "er" and "praline". Throws OutOfRange otherwise.
Formulation ParseFormulation(std::string_view name);

struct PralineOptions {
  bool acyclic = true;
  bool fup = true;
  /// Soft aligns(x,y) ^ setup(x) => !query(y).
  bool setup_query_block = true;
  double rule_weight = 1.0;
  double same_label_weight = 2.0;
  double different_label_weight = 0.5;
};

struct EncoderOptions {
  PralineOptions praline;
  /// Weight of isa(x,s) ^ !isa(y,s) => !sameAs(x,y).
  double er_distinct_weight = 1.0;
};

/// Formula family tags, one per emitted formula.
namespace family {
inline constexpr std::string_view kKbRule = "kb-rule";
inline constexpr std::string_view kExistential = "existential";
inline constexpr std::string_view kPartialMatch = "partial-match";
inline constexpr std::string_view kAlignment = "alignment";
inline constexpr std::string_view kIsaPropagation = "isa-propagation";
inline constexpr std::string_view kSemantic = "semantic";
inline constexpr std::string_view kResolution = "resolution";
inline constexpr std::string_view kSameAs = "sameas";
inline constexpr std::string_view kRefinedType = "refined-type";
inline constexpr std::string_view kResult = "result";
inline constexpr std::string_view kStructural = "structural";
inline constexpr std::string_view kInference = "inference";
inline constexpr std::string_view kSetup = "setup";
inline constexpr std::string_view kAcyclic = "acyclic";
inline constexpr std::string_view kFup = "fup";
inline constexpr std::string_view kSetupQuery = "setup-query";
}  // namespace family

struct Encoding {
  MlnProgram program;
  std::vector<std::string> families;  // parallel to program.formulas()

  size_t Count(std::string_view family) const;
};

/// Table score when present, else |tokens(a) ∩ tokens(b)| / |tokens(b)|.
double LexicalScore(std::string_view a, std::string_view b, const EntailmentTable& table);

/// Predicate name for a relation label between two node kinds, e.g.
/// ("agent", event, entity) -> "agentEA".
std::string RelationPredicate(std::string_view label, NodeKind from, NodeKind to);

/// Throws NoQueryNodes without query nodes and EmptyKb without rules.
Encoding EncodeFirstOrder(const QuestionGraph& question, const std::vector<KbRuleGraph>& rules,
                          const EntailmentTable& table, const EncoderOptions& options = {});

/// Throws NoQueryNodes without query nodes and EmptyKb without rules.
Encoding EncodeEntityResolution(const QuestionGraph& question,
                                const std::vector<KbRuleGraph>& rules,
                                const EntailmentTable& table,
                                const EncoderOptions& options = {});

/// Works with zero rules. Constants of rule nodes are `<rule id>_<node id>`.
Encoding EncodePraline(const QuestionGraph& question, const std::vector<KbRuleGraph>& rules,
                       const EntailmentTable& table, const EncoderOptions& options = {});

Encoding Encode(Formulation formulation, const QuestionGraph& question,
                const std::vector<KbRuleGraph>& rules, const EntailmentTable& table,
                const EncoderOptions& options = {});

/// Node constant used by the Praline encoding for a rule node.
std::string PralineRuleNode(const KbRuleGraph& rule, const GraphNode& node);

}  // namespace mlnqa

#endif  // MLNQA_ENCODERS_H_
