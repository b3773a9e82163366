#include "mlnqa/encoders.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <map>
#include <set>

#include "mlnqa/error.h"
#include "mlnqa/grounder.h"

namespace mlnqa {
namespace {

std::string KindSort(NodeKind kind) {
  return std::string(kind == NodeKind::kEvent ? kEventSort : kEntitySort);
}

char KindLetter(NodeKind kind) { return kind == NodeKind::kEvent ? 'E' : 'A'; }

std::string IsaPredicate(NodeKind kind) { return std::string("isa") + KindLetter(kind); }

std::string EntailsPredicate(NodeKind kind) {
  return std::string("entails") + KindLetter(kind) + KindLetter(kind);
}

std::string SameAsPredicate(NodeKind kind) {
  return std::string("sameAs") + KindLetter(kind);
}

const std::string kString(kStringSort);

Term Var(std::string name, std::string sort) {
  return Term::Variable(std::move(name), std::move(sort));
}
Term Const(std::string name, std::string sort) {
  return Term::Constant(std::move(name), std::move(sort));
}
Term Str(const std::string& s) { return Const(s, kString); }

Formula Lit(std::string pred, std::vector<Term> args, bool negated = false) {
  return Formula::Lit(Atom{std::move(pred), std::move(args)}, negated);
}

Formula Conj(std::vector<Formula> fs) {
  return fs.size() == 1 ? fs[0] : Formula::And(std::move(fs));
}

Formula Disj(std::vector<Formula> fs) {
  return fs.size() == 1 ? fs[0] : Formula::Or(std::move(fs));
}

// Maps a scale-free alignment score onto a non-negative weight: 0 stays 0,
// higher scores pull harder.
double AlignmentWeight(double score) {
  score = std::clamp(score, 0.0, 0.98);
  return WeightFromProbability((1.0 + score) / 2.0);
}

class Builder {
 public:
  void Constant(const std::string& sort, const std::string& name) {
    enc_.program.AddConstant(sort, name);
  }

  void Predicate(const std::string& name, std::vector<std::string> sorts,
                 bool closed_world = false) {
    if (enc_.program.FindPredicate(name)) return;
    enc_.program.DeclarePredicate({name, std::move(sorts), closed_world});
  }

  void Add(Formula f, Weight w, std::string_view fam) {
    if (!w.is_hard() && w.value() == 0.0) return;
    enc_.program.AddFormula(std::move(f), w);
    enc_.families.emplace_back(fam);
  }
  void Hard(Formula f, std::string_view fam) { Add(std::move(f), Weight::Hard(), fam); }
  void Soft(double w, Formula f, std::string_view fam) {
    Add(std::move(f), Weight::Soft(w), fam);
  }

  Evidence& evidence() { return enc_.program.mutable_evidence(); }
  MlnProgram& program() { return enc_.program; }
  std::vector<std::string>& families() { return enc_.families; }

  Encoding Finish() {
    enc_.program.Validate();
    return std::move(enc_);
  }

 private:
  Encoding enc_;
};

void RequireQuery(const QuestionGraph& q) {
  if (q.NodesWithRole(NodeRole::kQuery).empty())
    throw Error(ErrorCode::kNoQueryNodes, "question has no query nodes");
}

void RequireRules(const std::vector<KbRuleGraph>& rules) {
  if (rules.empty()) throw Error(ErrorCode::kEmptyKb, "encoding needs at least one KB rule");
}

bool TouchesRole(const LabeledGraph& g, const GraphEdge& e, NodeRole role) {
  return g.FindNode(e.from)->role == role || g.FindNode(e.to)->role == role;
}

// ---------------------------------------------------------------------------
// Shared by the first-order and entity-resolution encodings.

class RelationalEncoder {
 public:
  RelationalEncoder(const QuestionGraph& q, const std::vector<KbRuleGraph>& rules,
                    const EntailmentTable& table)
      : q_(q), rules_(rules), table_(table) {}

  void DeclareVocabulary(Builder& b, bool rule_constants) {
    auto visit = [&](const LabeledGraph& g, auto&& name_of) {
      for (const GraphNode& n : g.nodes) {
        kinds_.insert(n.kind);
        strings_[n.kind].insert(n.label);
        b.Constant(kString, n.label);
        if (auto name = name_of(n)) b.Constant(KindSort(n.kind), *name);
      }
      for (const GraphEdge& e : g.edges) {
        NodeKind from = g.FindNode(e.from)->kind, to = g.FindNode(e.to)->kind;
        std::string pred = RelationPredicate(e.label, from, to);
        b.Predicate(pred, {KindSort(from), KindSort(to)});
        relations_[pred] = {from, to};
      }
    };
    visit(q_, [](const GraphNode& n) { return std::optional<std::string>(n.id); });
    for (const KbRuleGraph& r : rules_)
      visit(r, [&](const GraphNode& n) {
        return rule_constants ? std::optional<std::string>(RuleConstant(r, n))
                              : std::nullopt;
      });
    for (NodeKind k : kinds_) {
      b.Predicate(IsaPredicate(k), {KindSort(k), kString});
      b.Predicate(EntailsPredicate(k), {kString, kString}, true);
    }
    b.Predicate("result", {});
  }

  static std::string RuleConstant(const KbRuleGraph& r, const GraphNode& n) {
    return r.id + "_" + n.id;
  }

  // Setup facts as hard evidence and lexical entailment as soft evidence.
  void AddEvidence(Builder& b) {
    for (const GraphNode& n : q_.nodes)
      if (n.role == NodeRole::kSetup)
        b.evidence().AddTrue({IsaPredicate(n.kind), {n.id, n.label}});
    for (const GraphEdge& e : q_.edges)
      if (!TouchesRole(q_, e, NodeRole::kQuery)) b.evidence().AddTrue(EdgeAtom(q_, e, {}));
    for (NodeKind k : kinds_)
      for (const std::string& s : strings_[k])
        for (const std::string& t : strings_[k]) {
          if (s == t) continue;
          double score = LexicalScore(s, t, table_);
          GroundAtom atom{EntailsPredicate(k), {s, t}};
          if (score >= 1.0)
            b.evidence().AddTrue(atom);
          else if (score > 0.0)
            b.evidence().AddSoft(atom, score);
        }
  }

  void AddIsaPropagation(Builder& b) {
    for (NodeKind k : kinds_) {
      Term x = Var("x", KindSort(k)), s = Var("s", kString), t = Var("t", kString);
      b.Hard(Formula::Implies(Conj({Lit(IsaPredicate(k), {x, s}),
                                    Lit(EntailsPredicate(k), {s, t})}),
                              Lit(IsaPredicate(k), {x, t})),
             family::kIsaPropagation);
    }
  }

  // result() <=> the query atoms that are not already evidence.
  void AddResult(Builder& b) {
    std::vector<GroundAtom> atoms;
    for (const GraphNode& n : q_.nodes)
      if (n.role == NodeRole::kQuery) atoms.push_back({IsaPredicate(n.kind), {n.id, n.label}});
    for (const GraphEdge& e : q_.edges)
      if (TouchesRole(q_, e, NodeRole::kQuery)) atoms.push_back(EdgeAtom(q_, e, {}));
    std::vector<Formula> conj;
    const MlnProgram& p = b.program();
    for (const GroundAtom& a : atoms) {
      if (p.evidence().HardValue(a) == true) continue;
      const PredicateDecl* decl = p.FindPredicate(a.predicate);
      std::vector<Term> args;
      for (size_t i = 0; i < a.args.size(); ++i) args.push_back(Const(a.args[i], decl->arg_sorts[i]));
      conj.push_back(Lit(a.predicate, std::move(args)));
    }
    Formula result = Lit("result", {});
    b.Hard(conj.empty() ? result : Formula::Equiv(result, Conj(std::move(conj))),
           family::kResult);
  }

  static GroundAtom EdgeAtom(const LabeledGraph& g, const GraphEdge& e,
                             const std::function<std::string(const GraphNode&)>& name) {
    const GraphNode* from = g.FindNode(e.from);
    const GraphNode* to = g.FindNode(e.to);
    auto id = [&](const GraphNode* n) { return name ? name(*n) : n->id; };
    return {RelationPredicate(e.label, from->kind, to->kind), {id(from), id(to)}};
  }

  const std::set<NodeKind>& kinds() const { return kinds_; }
  const std::map<std::string, std::pair<NodeKind, NodeKind>>& relations() const {
    return relations_;
  }
  const std::map<NodeKind, std::set<std::string>>& strings() const { return strings_; }

 private:
  const QuestionGraph& q_;
  const std::vector<KbRuleGraph>& rules_;
  const EntailmentTable& table_;
  std::set<NodeKind> kinds_;
  std::map<NodeKind, std::set<std::string>> strings_;
  std::map<std::string, std::pair<NodeKind, NodeKind>> relations_;
};

double MeanScore(const std::vector<const GraphNode*>& from,
                 const std::vector<const GraphNode*>& to, const EntailmentTable& table) {
  if (from.empty() || to.empty()) return 0.0;
  double sum = 0.0;
  for (const GraphNode* a : from)
    for (const GraphNode* b : to) sum += LexicalScore(a->label, b->label, table);
  return sum / static_cast<double>(from.size() * to.size());
}

// Variable names for a rule's nodes: lowercased ids, made unique.
std::map<std::string, Term> RuleVariables(const KbRuleGraph& r) {
  std::map<std::string, Term> out;
  std::set<std::string> used;
  for (const GraphNode& n : r.nodes) {
    std::string base;
    for (char c : n.id)
      base += std::isalnum(static_cast<unsigned char>(c))
                  ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                  : '_';
    if (base.empty() || !std::islower(static_cast<unsigned char>(base[0]))) base = "v" + base;
    std::string name = base;
    for (int i = 2; used.contains(name); ++i) name = base + std::to_string(i);
    used.insert(name);
    out.emplace(n.id, Var(name, KindSort(n.kind)));
  }
  return out;
}

// Tiny table holding the lexical score of every ordered string pair, so that
// passes that only read tables see the fallback scores too.
EntailmentTable EffectiveTable(const std::map<NodeKind, std::set<std::string>>& strings,
                               const EntailmentTable& table) {
  std::set<std::string> all;
  for (const auto& [k, s] : strings) all.insert(s.begin(), s.end());
  EntailmentTable out;
  for (const std::string& a : all)
    for (const std::string& b : all)
      if (double s = LexicalScore(a, b, table); s > 0.0) out.Set(a, b, s);
  return out;
}

}  // namespace

size_t Encoding::Count(std::string_view fam) const {
  return static_cast<size_t>(std::count(families.begin(), families.end(), fam));
}

std::string_view FormulationName(Formulation f) {
  switch (f) {
    case Formulation::kFirstOrder: return "fo";
    case Formulation::kEntityResolution: return "er";
    case Formulation::kPraline: return "praline";
  }
  return "?";
}

Formulation ParseFormulation(std::string_view name) {
  if (name == "fo") return Formulation::kFirstOrder;
  if (name == "er") return Formulation::kEntityResolution;
  if (name == "praline") return Formulation::kPraline;
  throw Error(ErrorCode::kOutOfRange, "unknown formulation '" + std::string(name) + "'");
}

double LexicalScore(std::string_view a, std::string_view b, const EntailmentTable& table) {
  if (auto s = table.Lookup(NormalizeString(a), NormalizeString(b))) return *s;
  std::vector<std::string> ta = LabelTokens(a), tb = LabelTokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sb.empty()) return 0.0;
  size_t common = 0;
  for (const std::string& t : sb) common += sa.contains(t);
  return static_cast<double>(common) / static_cast<double>(sb.size());
}

std::string RelationPredicate(std::string_view label, NodeKind from, NodeKind to) {
  return std::string(label) + KindLetter(from) + KindLetter(to);
}

std::string PralineRuleNode(const KbRuleGraph& rule, const GraphNode& node) {
  return rule.id + "_" + node.id;
}

Encoding EncodeFirstOrder(const QuestionGraph& q, const std::vector<KbRuleGraph>& rules,
                          const EntailmentTable& table, const EncoderOptions&) {
  RequireQuery(q);
  RequireRules(rules);
  Builder b;
  RelationalEncoder enc(q, rules, table);
  enc.DeclareVocabulary(b, false);
  enc.AddEvidence(b);

  // KB rules over variables; rhs-only nodes are existential.
  for (const KbRuleGraph& r : rules) {
    std::map<std::string, Term> vars = RuleVariables(r);
    auto isa = [&](const GraphNode& n) {
      return Lit(IsaPredicate(n.kind), {vars.at(n.id), Str(n.label)});
    };
    auto edge = [&](const GraphEdge& e) {
      const GraphNode* from = r.FindNode(e.from);
      const GraphNode* to = r.FindNode(e.to);
      return Lit(RelationPredicate(e.label, from->kind, to->kind),
                 {vars.at(from->id), vars.at(to->id)});
    };
    std::vector<Formula> ante, cons;
    std::vector<Term> existential;
    for (const GraphNode& n : r.nodes) {
      if (n.role == NodeRole::kLhs) {
        ante.push_back(isa(n));
      } else {
        cons.push_back(isa(n));
        existential.push_back(vars.at(n.id));
      }
    }
    for (const GraphEdge& e : r.edges)
      (TouchesRole(r, e, NodeRole::kRhs) ? cons : ante).push_back(edge(e));
    b.program().AddFormula(
        Formula::Implies(Conj(std::move(ante)),
                         Formula::Exists(existential, Conj(std::move(cons)))),
        Weight::Soft(WeightFromProbability(r.confidence)));
  }
  b.program() = RewriteExistentials(b.program());
  for (size_t i = 0; i < b.program().formulas().size(); ++i)
    b.families().emplace_back(i % 2 == 0 ? family::kKbRule : family::kExistential);

  // Two lexical-alignment formulas per rule.
  const std::vector<const GraphNode*> setup = q.NodesWithRole(NodeRole::kSetup);
  const std::vector<const GraphNode*> query = q.NodesWithRole(NodeRole::kQuery);
  for (size_t k = 0; k < rules.size(); ++k) {
    const KbRuleGraph& r = rules[k];
    std::string e_pred = "E" + std::to_string(k + 1);
    const PredicateDecl* e_decl = b.program().FindPredicate(e_pred);
    std::vector<const GraphNode*> lhs = r.NodesWithRole(NodeRole::kLhs);
    std::vector<const GraphNode*> rhs = r.NodesWithRole(NodeRole::kRhs);

    // Setup entails antecedent: assert the antecedent at its best alignment.
    std::map<std::string, std::string> sigma;
    for (const GraphNode* n : lhs) {
      const GraphNode* best = nullptr;
      double best_score = -1.0;
      for (const GraphNode* s : setup) {
        if (s->kind != n->kind) continue;
        double score = LexicalScore(s->label, n->label, table);
        if (score > best_score) best = s, best_score = score;
      }
      if (best) sigma[n->id] = best->id;
    }
    if (sigma.size() == lhs.size()) {
      std::vector<Formula> ante;
      for (const GraphNode* n : lhs)
        ante.push_back(Lit(IsaPredicate(n->kind),
                           {Const(sigma.at(n->id), KindSort(n->kind)), Str(n->label)}));
      for (const GraphEdge& e : r.edges) {
        if (TouchesRole(r, e, NodeRole::kRhs)) continue;
        const GraphNode* from = r.FindNode(e.from);
        const GraphNode* to = r.FindNode(e.to);
        ante.push_back(Lit(RelationPredicate(e.label, from->kind, to->kind),
                           {Const(sigma.at(from->id), KindSort(from->kind)),
                            Const(sigma.at(to->id), KindSort(to->kind))}));
      }
      b.Soft(AlignmentWeight(MeanScore(setup, lhs, table)), Conj(std::move(ante)),
             family::kAlignment);
    }

    // Consequent entails query: any realization of the consequent => result().
    if (e_decl) {
      std::vector<Term> args;
      for (size_t i = 0; i < e_decl->arg_sorts.size(); ++i)
        args.push_back(Var("v" + std::to_string(i), e_decl->arg_sorts[i]));
      b.Soft(AlignmentWeight(MeanScore(rhs, query, table)),
             Formula::Implies(Lit(e_pred, std::move(args)), Lit("result", {})),
             family::kAlignment);
    }
  }

  enc.AddIsaPropagation(b);

  // Semantic rules.
  const SortDecl* entities = b.program().FindSort(kEntitySort);
  for (const auto& [pred, kinds] : enc.relations()) {
    auto [from, to] = kinds;
    std::string label = pred.substr(0, pred.size() - 2);
    Term x = Var("x", KindSort(from)), y = Var("y", KindSort(to));
    if (label == "agent" && from == NodeKind::kEvent && to == NodeKind::kEntity && entities) {
      std::vector<std::string> cs = entities->constants;
      std::sort(cs.begin(), cs.end());
      for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j)
          b.Hard(Formula::Or({Lit(pred, {x, Const(cs[i], KindSort(to))}, true),
                              Lit(pred, {x, Const(cs[j], KindSort(to))}, true)}),
                 family::kSemantic);
    }
    if (label == "cause") {
      std::string effect = RelationPredicate("effect", to, from);
      if (b.program().FindPredicate(effect))
        b.Hard(Formula::Implies(Lit(pred, {x, y}), Lit(effect, {y, x})), family::kSemantic);
    }
    if (from == to) {
      b.Hard(Lit(pred, {x, x}, true), family::kSemantic);
      b.Hard(Formula::Implies(Lit(pred, {x, y}), Lit(pred, {y, x}, true)), family::kSemantic);
    }
  }

  enc.AddResult(b);

  size_t before = b.program().formulas().size();
  b.program() = RefinedTypeRules(b.program(), EffectiveTable(enc.strings(), table));
  for (size_t i = before; i < b.program().formulas().size(); ++i)
    b.families().emplace_back(family::kRefinedType);
  return b.Finish();
}

Encoding EncodeEntityResolution(const QuestionGraph& q, const std::vector<KbRuleGraph>& rules,
                                const EntailmentTable& table,
                                const EncoderOptions& options) {
  RequireQuery(q);
  RequireRules(rules);
  Builder b;
  RelationalEncoder enc(q, rules, table);
  enc.DeclareVocabulary(b, true);
  enc.AddEvidence(b);

  // Prototypical constants are tied to their strings.
  for (const KbRuleGraph& r : rules)
    for (const GraphNode& n : r.nodes)
      b.evidence().AddTrue(
          {IsaPredicate(n.kind), {RelationalEncoder::RuleConstant(r, n), n.label}});

  for (const KbRuleGraph& r : rules) {
    auto name = [&](const GraphNode& n) { return RelationalEncoder::RuleConstant(r, n); };
    auto edge = [&](const GraphEdge& e) {
      GroundAtom a = RelationalEncoder::EdgeAtom(r, e, name);
      const GraphNode* from = r.FindNode(e.from);
      const GraphNode* to = r.FindNode(e.to);
      return Lit(a.predicate, {Const(a.args[0], KindSort(from->kind)),
                               Const(a.args[1], KindSort(to->kind))});
    };
    std::vector<Formula> ante, cons;
    for (const GraphEdge& e : r.edges)
      (TouchesRole(r, e, NodeRole::kRhs) ? cons : ante).push_back(edge(e));
    if (cons.empty()) continue;
    double w = WeightFromProbability(r.confidence);
    Formula consequent = Conj(cons);
    b.Soft(w, ante.empty() ? consequent : Formula::Implies(Conj(ante), consequent),
           family::kKbRule);
    for (const Formula& l : ante)
      b.Soft(w / static_cast<double>(ante.size()), Formula::Implies(l, consequent),
             family::kPartialMatch);
  }

  enc.AddIsaPropagation(b);
  for (NodeKind k : enc.kinds()) {
    std::string sort = KindSort(k), isa = IsaPredicate(k), same = SameAsPredicate(k);
    b.Predicate(same, {sort, sort});
    Term x = Var("x", sort), y = Var("y", sort), z = Var("z", sort), s = Var("s", kString);
    b.Hard(Formula::Implies(Conj({Lit(isa, {x, s}), Lit(isa, {y, s})}), Lit(same, {x, y})),
           family::kResolution);
    b.Soft(options.er_distinct_weight,
           Formula::Implies(Conj({Lit(isa, {x, s}), Lit(isa, {y, s}, true)}),
                            Lit(same, {x, y}, true)),
           family::kResolution);
    b.Hard(Lit(same, {x, x}), family::kSameAs);
    b.Hard(Formula::Implies(Lit(same, {x, y}), Lit(same, {y, x})), family::kSameAs);
    b.Hard(Formula::Implies(Conj({Lit(same, {x, y}), Lit(same, {y, z})}), Lit(same, {x, z})),
           family::kSameAs);
  }
  for (const auto& [pred, kinds] : enc.relations()) {
    auto [from, to] = kinds;
    Term x = Var("x", KindSort(from)), y = Var("y", KindSort(to));
    Term z_to = Var("z", KindSort(to)), z_from = Var("z", KindSort(from));
    b.Hard(Formula::Implies(Conj({Lit(pred, {x, y}), Lit(SameAsPredicate(to), {y, z_to})}),
                            Lit(pred, {x, z_to})),
           family::kResolution);
    b.Hard(Formula::Implies(Conj({Lit(pred, {x, y}), Lit(SameAsPredicate(from), {x, z_from})}),
                            Lit(pred, {z_from, y})),
           family::kResolution);
  }

  enc.AddResult(b);
  return b.Finish();
}

Encoding EncodePraline(const QuestionGraph& q, const std::vector<KbRuleGraph>& rules,
                       const EntailmentTable& table, const EncoderOptions& options) {
  const PralineOptions& opt = options.praline;
  const std::string node_sort(kNodeSort), rule_sort(kRuleSort);
  Builder b;

  struct Node {
    std::string name;
    const GraphNode* node;
    int graph;  // 0 for the question, i + 1 for rule i
  };
  std::vector<Node> nodes;
  for (const GraphNode& n : q.nodes) nodes.push_back({n.id, &n, 0});
  for (size_t i = 0; i < rules.size(); ++i)
    for (const GraphNode& n : rules[i].nodes)
      nodes.push_back({PralineRuleNode(rules[i], n), &n, static_cast<int>(i) + 1});

  for (const Node& n : nodes) b.Constant(node_sort, n.name);
  for (const KbRuleGraph& r : rules) b.Constant(rule_sort, r.id);
  std::set<std::string> labels;
  for (const GraphEdge& e : q.edges) labels.insert(e.label);
  for (const KbRuleGraph& r : rules)
    for (const GraphEdge& e : r.edges) labels.insert(e.label);
  for (const std::string& l : labels) b.Constant(kString, l);

  b.Predicate("node", {node_sort}, true);
  b.Predicate("setup", {node_sort}, true);
  b.Predicate("query", {node_sort}, true);
  b.Predicate("aligns", {node_sort, node_sort}, true);
  b.Predicate("similar", {node_sort, node_sort}, true);
  b.Predicate("holds", {node_sort});
  b.Predicate("proves", {node_sort, node_sort});
  b.Predicate("result", {});
  if (!labels.empty()) {
    b.Predicate("edge", {node_sort, node_sort, kString}, true);
    b.Predicate("difflabel", {kString, kString}, true);
  }
  if (!rules.empty()) {
    b.Predicate("inlhs", {node_sort, rule_sort}, true);
    b.Predicate("inrhs", {rule_sort, node_sort}, true);
    b.Predicate("lhsHolds", {rule_sort});
    b.Predicate("rhsHolds", {rule_sort});
  }

  // Input graphs as evidence.
  Evidence& ev = b.evidence();
  for (const Node& n : nodes) {
    ev.AddTrue({"node", {n.name}});
    if (n.node->role == NodeRole::kSetup) ev.AddTrue({"setup", {n.name}});
    if (n.node->role == NodeRole::kQuery) ev.AddTrue({"query", {n.name}});
  }
  for (const GraphEdge& e : q.edges) ev.AddTrue({"edge", {e.from, e.to, e.label}});
  for (const KbRuleGraph& r : rules) {
    for (const GraphEdge& e : r.edges)
      ev.AddTrue({"edge",
                  {PralineRuleNode(r, *r.FindNode(e.from)), PralineRuleNode(r, *r.FindNode(e.to)),
                   e.label}});
    for (const GraphNode& n : r.nodes) {
      if (n.role == NodeRole::kLhs)
        ev.AddTrue({"inlhs", {PralineRuleNode(r, n), r.id}});
      else
        ev.AddTrue({"inrhs", {r.id, PralineRuleNode(r, n)}});
    }
  }
  for (const std::string& l : labels)
    for (const std::string& m : labels)
      if (l != m) ev.AddTrue({"difflabel", {l, m}});

  // Alignment priors between nodes of different graphs, from a node that can
  // supply a fact (setup, consequent) to one that needs it (antecedent, query).
  auto supplies = [](const Node& n) {
    return n.node->role == NodeRole::kSetup || n.node->role == NodeRole::kRhs;
  };
  std::map<std::string, std::vector<std::string>> candidates;  // y -> possible x
  for (const Node& x : nodes)
    for (const Node& y : nodes) {
      if (x.graph == y.graph || !supplies(x) || supplies(y)) continue;
      double s = LexicalScore(x.node->label, y.node->label, table);
      if (s <= 0.0) continue;
      candidates[y.name].push_back(x.name);
      ev.AddTrue({"similar", {x.name, y.name}});
      if (s >= 1.0)
        ev.AddTrue({"aligns", {x.name, y.name}});
      else
        ev.AddSoft({"aligns", {x.name, y.name}}, s);
    }

  Term x = Var("x", node_sort), y = Var("y", node_sort), z = Var("z", node_sort);
  Term u = Var("u", node_sort), v = Var("v", node_sort);
  Term r = Var("r", rule_sort), r2 = Var("s", rule_sort), r3 = Var("t", rule_sort);
  Term l = Var("l", kString), m = Var("m", kString);

  // Neighbours of aligned nodes align too, when they could align at all.
  if (!labels.empty()) {
    auto structural = [&](double w, bool same, bool down) {
      std::vector<Formula> body = {Lit("aligns", down ? std::vector{x, y} : std::vector{u, v}),
                                   Lit("edge", {x, u, l}),
                                   Lit("edge", {y, v, same ? l : m})};
      if (!same) body.push_back(Lit("difflabel", {l, m}));
      body.push_back(Lit("similar", down ? std::vector{u, v} : std::vector{x, y}));
      b.Soft(w,
             Formula::Implies(Conj(std::move(body)),
                              Lit("aligns", down ? std::vector{u, v} : std::vector{x, y})),
             family::kStructural);
    };
    structural(opt.same_label_weight, true, true);
    structural(opt.same_label_weight, true, false);
    structural(opt.different_label_weight, false, true);
    structural(opt.different_label_weight, false, false);
  }

  const double w = opt.rule_weight;
  b.Soft(w, Formula::Implies(Conj({Lit("proves", {x, y}), Lit("holds", {x})}), Lit("holds", {y})),
         family::kInference);
  b.Soft(w, Formula::Implies(Lit("aligns", {x, y}), Lit("proves", {x, y})), family::kInference);
  b.Hard(Formula::Implies(Lit("proves", {x, y}), Lit("similar", {x, y})), family::kInference);
  if (!rules.empty()) {
    b.Soft(w,
           Formula::Implies(Conj({Lit("holds", {x}), Lit("inlhs", {x, r})}), Lit("lhsHolds", {r})),
           family::kInference);
    b.Soft(w,
           Formula::Implies(Conj({Lit("holds", {x}, true), Lit("inlhs", {x, r})}),
                            Lit("lhsHolds", {r}, true)),
           family::kInference);
    b.Hard(Formula::Implies(Lit("lhsHolds", {r}), Lit("rhsHolds", {r})), family::kInference);
    b.Hard(Formula::Implies(Conj({Lit("rhsHolds", {r}), Lit("inrhs", {r, x})}), Lit("holds", {x})),
           family::kInference);
  }

  b.Hard(Formula::Implies(Lit("setup", {x}), Lit("holds", {x})), family::kSetup);

  if (opt.acyclic) {
    b.Hard(Formula::Implies(Conj({Lit("proves", {x, y}), Lit("proves", {y, z})}),
                            Lit("proves", {x, z})),
           family::kAcyclic);
    b.Hard(Lit("proves", {x, x}, true), family::kAcyclic);
    if (!rules.empty()) {
      b.Predicate("ruleProves", {rule_sort, rule_sort});
      b.Hard(Formula::Implies(Conj({Lit("ruleProves", {r, r2}), Lit("ruleProves", {r2, r3})}),
                              Lit("ruleProves", {r, r3})),
             family::kAcyclic);
      b.Hard(Lit("ruleProves", {r, r}, true), family::kAcyclic);
      b.Hard(Formula::Implies(Conj({Lit("proves", {x, y}), Lit("inrhs", {r, x}),
                                    Lit("inlhs", {y, r2})}),
                              Lit("ruleProves", {r, r2})),
             family::kAcyclic);
    }
  }

  if (opt.fup) {
    b.Predicate("candidateProof", {node_sort, node_sort});
    auto node = [&](const std::string& name) { return Const(name, node_sort); };
    for (const auto& [target, sources] : candidates)
      for (const std::string& source : sources)
        b.Hard(Formula::Equiv(Lit("candidateProof", {node(source), node(target)}),
                              Conj({Lit("proves", {node(source), node(target)}),
                                    Lit("holds", {node(source)})})),
               family::kFup);
    for (const Node& n : nodes) {
      std::vector<Formula> reasons = {Lit("setup", {node(n.name)})};
      if (auto it = candidates.find(n.name); it != candidates.end())
        for (const std::string& source : it->second)
          reasons.push_back(Lit("candidateProof", {node(source), node(n.name)}));
      if (n.graph > 0 && n.node->role == NodeRole::kRhs)
        reasons.push_back(Lit("rhsHolds", {Const(rules[n.graph - 1].id, rule_sort)}));
      b.Hard(Formula::Implies(Lit("holds", {node(n.name)}), Disj(std::move(reasons))),
             family::kFup);
    }
    for (size_t i = 0; i < rules.size(); ++i) {
      Term rc = Const(rules[i].id, rule_sort);
      b.Hard(Formula::Implies(Lit("rhsHolds", {rc}), Lit("lhsHolds", {rc})), family::kFup);
      std::vector<Formula> lhs;
      for (const GraphNode& n : rules[i].nodes)
        if (n.role == NodeRole::kLhs) lhs.push_back(Lit("holds", {node(PralineRuleNode(rules[i], n))}));
      b.Hard(Formula::Implies(Lit("lhsHolds", {rc}), Disj(std::move(lhs))), family::kFup);
    }
  }

  if (opt.setup_query_block)
    b.Soft(w,
           Formula::Implies(Conj({Lit("aligns", {x, y}), Lit("setup", {x})}),
                            Lit("query", {y}, true)),
           family::kSetupQuery);

  std::vector<Formula> query;
  for (const GraphNode* n : q.NodesWithRole(NodeRole::kQuery))
    query.push_back(Lit("holds", {Const(n->id, node_sort)}));
  Formula result = Lit("result", {});
  b.Hard(query.empty() ? result : Formula::Equiv(result, Conj(std::move(query))),
         family::kResult);
  return b.Finish();
}

Encoding Encode(Formulation formulation, const QuestionGraph& question,
                const std::vector<KbRuleGraph>& rules, const EntailmentTable& table,
                const EncoderOptions& options) {
  switch (formulation) {
    case Formulation::kFirstOrder: return EncodeFirstOrder(question, rules, table, options);
    case Formulation::kEntityResolution:
      return EncodeEntityResolution(question, rules, table, options);
    case Formulation::kPraline: return EncodePraline(question, rules, table, options);
  }
  throw Error(ErrorCode::kOutOfRange, "unknown formulation");
}

}  // namespace mlnqa
