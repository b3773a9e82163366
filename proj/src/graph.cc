#include "mlnqa/graph.h"

#include <cctype>

namespace mlnqa {

std::string_view NodeKindName(NodeKind kind) {
  return kind == NodeKind::kEntity ? "entity" : "event";
}

std::string_view NodeRoleName(NodeRole role) {
  switch (role) {
    case NodeRole::kSetup: return "setup";
    case NodeRole::kQuery: return "query";
    case NodeRole::kLhs: return "lhs";
    case NodeRole::kRhs: return "rhs";
  }
  return "?";
}

const GraphNode* LabeledGraph::FindNode(std::string_view id) const {
  for (const GraphNode& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::vector<const GraphNode*> LabeledGraph::NodesWithRole(NodeRole role) const {
  std::vector<const GraphNode*> out;
  for (const GraphNode& n : nodes)
    if (n.role == role) out.push_back(&n);
  return out;
}

std::vector<std::string> LabelTokens(std::string_view label) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : label) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace mlnqa
