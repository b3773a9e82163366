#ifndef MLNQA_GRAPH_H_
#define MLNQA_GRAPH_H_

// Labeled node/edge graphs for questions and extracted KB rules.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlnqa {

enum class NodeKind { kEntity, kEvent };
enum class NodeRole { kSetup, kQuery, kLhs, kRhs };

std::string_view NodeKindName(NodeKind kind);
std::string_view NodeRoleName(NodeRole role);

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::kEntity;
  std::string label;  // normalized string
  NodeRole role = NodeRole::kSetup;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string label;
  std::string from;
  std::string to;

  bool operator==(const GraphEdge&) const = default;
};

struct LabeledGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  const GraphNode* FindNode(std::string_view id) const;
  std::vector<const GraphNode*> NodesWithRole(NodeRole role) const;

  bool operator==(const LabeledGraph&) const = default;
};

/// A true/false question: setup facts plus the posited query.
struct QuestionGraph : LabeledGraph {
  bool operator==(const QuestionGraph&) const = default;
};

/// An extracted IF-THEN rule; lhs nodes are the antecedent, rhs the
/// consequent.
struct KbRuleGraph : LabeledGraph {
  std::string id;
  double confidence = 0.9;

  bool operator==(const KbRuleGraph&) const = default;
};

/// One `graph option <name>` block: query nodes and edges that may refer to
/// the shared setup nodes.
struct OptionGraph : LabeledGraph {
  std::string name;

  bool operator==(const OptionGraph&) const = default;
};

/// Lowercased tokens of a label, split on underscores and whitespace.
std::vector<std::string> LabelTokens(std::string_view label);

}  // namespace mlnqa

#endif  // MLNQA_GRAPH_H_
