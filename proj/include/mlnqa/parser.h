#ifndef MLNQA_PARSER_H_
#define MLNQA_PARSER_H_

// Readers and writers for the line-oriented on-disk formats:
//   .mln  sorts, predicate declarations and weighted formulas
//   .db   hard and soft evidence
//   .qg   question / option / rule graphs
//   .ent  directed entailment scores
// `//` starts a comment anywhere outside a quoted string.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlnqa/entailment.h"
#include "mlnqa/graph.h"
#include "mlnqa/logic.h"

namespace mlnqa {

MlnProgram ParseMln(std::string_view text, std::string_view file = {});

/// Evidence lines are checked against the declarations in `context`.
Evidence ParseDb(std::string_view text, const MlnProgram& context,
                 std::string_view file = {});

struct QgDocument {
  std::optional<QuestionGraph> question;
  std::vector<OptionGraph> options;
  std::vector<KbRuleGraph> rules;

  bool operator==(const QgDocument&) const = default;
};

QgDocument ParseQgDocument(std::string_view text, std::string_view file = {});

/// The question block (empty if absent) and all rule blocks.
std::pair<QuestionGraph, std::vector<KbRuleGraph>> ParseQg(
    std::string_view text, std::string_view file = {});

EntailmentTable ParseEnt(std::string_view text, std::string_view file = {});

std::string SerializeMln(const MlnProgram& program);
std::string SerializeDb(const Evidence& evidence);
std::string SerializeQg(const QgDocument& document);
std::string SerializeEnt(const EntailmentTable& table);

std::string FormatFormula(const Formula& formula);
/// Shortest decimal text that parses back to the same double.
std::string FormatNumber(double value);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view contents);

}  // namespace mlnqa

#endif  // MLNQA_PARSER_H_
