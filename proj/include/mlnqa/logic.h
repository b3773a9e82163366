#ifndef MLNQA_LOGIC_H_
#define MLNQA_LOGIC_H_

// Typed first-order representation of MLN programs: terms, atoms, formulas,
// weights, evidence and the program container itself.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlnqa {

inline constexpr std::string_view kEntitySort = "entity";
inline constexpr std::string_view kEventSort = "event";
inline constexpr std::string_view kStringSort = "string_";
inline constexpr std::string_view kRuleSort = "rule_id";
inline constexpr std::string_view kNodeSort = "node_id";

bool IsBuiltinSort(std::string_view name);

struct Term {
  enum class Kind { kVariable, kConstant };

  Kind kind = Kind::kConstant;
  std::string name;
  std::string sort;

  static Term Variable(std::string name, std::string sort) {
    return {Kind::kVariable, std::move(name), std::move(sort)};
  }
  static Term Constant(std::string name, std::string sort) {
    return {Kind::kConstant, std::move(name), std::move(sort)};
  }

  bool is_variable() const { return kind == Kind::kVariable; }

  auto operator<=>(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool IsGround() const;
  auto operator<=>(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  Literal Negate() const { return {atom, !negated}; }
  auto operator<=>(const Literal&) const = default;
};

/// A ground atom in canonical form: predicate name plus constant names.
struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  /// `pred(A,"fox")`; constants are quoted unless they are Capitalized
  /// identifiers.
  std::string ToString() const;
  auto operator<=>(const GroundAtom&) const = default;
};

/// Text form of a constant as it appears in .mln/.db files.
std::string FormatConstant(std::string_view name);
bool IsBareConstant(std::string_view name);

/// Immutable formula tree with cheap copies (shared nodes).
class Formula {
 public:
  enum class Kind { kLiteral, kAnd, kOr, kNot, kImplies, kEquiv, kExists };

  static Formula Lit(Literal literal);
  static Formula Lit(Atom atom, bool negated = false);
  static Formula And(std::vector<Formula> children);
  static Formula Or(std::vector<Formula> children);
  static Formula Not(Formula child);
  static Formula Implies(Formula antecedent, Formula consequent);
  static Formula Equiv(Formula lhs, Formula rhs);
  static Formula Exists(std::vector<Term> variables, Formula body);

  Kind kind() const;
  const Literal& literal() const;
  /// And/Or: operands; Not: one child; Implies/Equiv: two; Exists: the body.
  std::span<const Formula> children() const;
  const std::vector<Term>& bound_variables() const;

  bool ContainsExists() const;
  bool IsSingleLiteral() const;
  /// Variables not bound by an Exists, in order of first occurrence.
  std::vector<Term> FreeVariables() const;
  void CollectLiterals(std::vector<const Literal*>& out) const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Either HARD or a finite real weight. HARD is never encoded as a number.
class Weight {
 public:
  static Weight Hard() { return Weight(true, 0.0); }
  static Weight Soft(double value);

  bool is_hard() const { return hard_; }
  double value() const { return value_; }

  bool operator==(const Weight&) const = default;

 private:
  Weight(bool hard, double value) : hard_(hard), value_(value) {}
  bool hard_;
  double value_;
};

struct WeightedFormula {
  Formula formula;
  Weight weight;

  bool operator==(const WeightedFormula&) const = default;
};

struct SortDecl {
  std::string name;
  std::vector<std::string> constants;  // declaration order

  bool operator==(const SortDecl&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  bool closed_world = false;

  size_t arity() const { return arg_sorts.size(); }
  bool operator==(const PredicateDecl&) const = default;
};

class Evidence {
 public:
  void AddTrue(GroundAtom atom);
  void AddFalse(GroundAtom atom);
  /// p must lie strictly inside (0,1).
  void AddSoft(GroundAtom atom, double probability);

  const std::set<GroundAtom>& hard_true() const { return hard_true_; }
  const std::set<GroundAtom>& hard_false() const { return hard_false_; }
  const std::map<GroundAtom, double>& soft() const { return soft_; }

  std::optional<bool> HardValue(const GroundAtom& atom) const;
  bool HasSoft(const GroundAtom& atom) const { return soft_.contains(atom); }
  bool empty() const {
    return hard_true_.empty() && hard_false_.empty() && soft_.empty();
  }

  bool operator==(const Evidence&) const = default;

 private:
  std::set<GroundAtom> hard_true_;
  std::set<GroundAtom> hard_false_;
  std::map<GroundAtom, double> soft_;
};

/// Sorts with their domains, predicate declarations, weighted formulas and
/// evidence. Built incrementally, then passed around by const reference.
class MlnProgram {
 public:
  MlnProgram();

  MlnProgram& DeclareSort(const std::string& name);
  /// Idempotent. The sort must exist.
  MlnProgram& AddConstant(const std::string& sort, const std::string& name);
  MlnProgram& DeclarePredicate(PredicateDecl decl);
  MlnProgram& AddFormula(Formula formula, Weight weight);
  MlnProgram& AddFormula(WeightedFormula wf);
  Evidence& mutable_evidence() { return evidence_; }

  const std::vector<SortDecl>& sorts() const { return sorts_; }
  const SortDecl* FindSort(std::string_view name) const;
  bool HasConstant(std::string_view sort, std::string_view name) const;
  const std::vector<PredicateDecl>& predicates() const { return predicates_; }
  const PredicateDecl* FindPredicate(std::string_view name) const;
  const std::vector<WeightedFormula>& formulas() const { return formulas_; }
  std::vector<WeightedFormula>& mutable_formulas() { return formulas_; }
  const Evidence& evidence() const { return evidence_; }

  /// Checks arities, argument sorts, declared constants and evidence
  /// consistency. Throws Error on the first violation.
  void Validate() const;
  void CheckAtom(const Atom& atom) const;
  void CheckGroundAtom(const GroundAtom& atom) const;

  bool operator==(const MlnProgram& other) const;

 private:
  std::vector<SortDecl> sorts_;
  std::map<std::string, size_t, std::less<>> sort_index_;
  std::vector<std::set<std::string, std::less<>>> sort_members_;
  std::vector<PredicateDecl> predicates_;
  std::map<std::string, size_t, std::less<>> predicate_index_;
  std::vector<WeightedFormula> formulas_;
  Evidence evidence_;
};

using ClauseTemplate = std::vector<Literal>;

/// Exact clausification by distribution. Duplicate literals are merged and
/// tautological clauses dropped. Throws ExistentialPresent.
std::vector<ClauseTemplate> ToCnf(const Formula& formula);

/// ln(p / (1 - p)). Throws OutOfRange unless 0 < p < 1.
double WeightFromProbability(double p);
double Sigmoid(double w);

/// Rewrites negative-weight unit formulas as their negation with weight -w.
/// Throws NegativeNonUnitWeight for any other negative soft formula.
MlnProgram NormalizeNegativeWeights(const MlnProgram& program);

}  // namespace mlnqa

#endif  // MLNQA_LOGIC_H_
