#include "mlnqa/logic.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "mlnqa/error.h"

namespace mlnqa {

bool IsBuiltinSort(std::string_view name) {
  return name == kEntitySort || name == kEventSort || name == kStringSort ||
         name == kRuleSort || name == kNodeSort;
}

bool Atom::IsGround() const {
  return std::none_of(args.begin(), args.end(),
                      [](const Term& t) { return t.is_variable(); });
}

bool IsBareConstant(std::string_view name) {
  if (name.empty() || !std::isupper(static_cast<unsigned char>(name[0])))
    return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string FormatConstant(std::string_view name) {
  if (IsBareConstant(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string GroundAtom::ToString() const {
  std::string out = predicate + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += FormatConstant(args[i]);
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind;
  Literal literal;
  std::vector<Formula> children;
  std::vector<Term> bound;
};

Formula Formula::Lit(Literal literal) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kLiteral, std::move(literal), {}, {}}));
}

Formula Formula::Lit(Atom atom, bool negated) {
  return Lit(Literal{std::move(atom), negated});
}

Formula Formula::And(std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kAnd, {}, std::move(children), {}}));
}

Formula Formula::Or(std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kOr, {}, std::move(children), {}}));
}

Formula Formula::Not(Formula child) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kNot, {}, {std::move(child)}, {}}));
}

Formula Formula::Implies(Formula antecedent, Formula consequent) {
  return Formula(std::make_shared<const Node>(Node{
      Kind::kImplies, {}, {std::move(antecedent), std::move(consequent)}, {}}));
}

Formula Formula::Equiv(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kEquiv, {}, {std::move(lhs), std::move(rhs)}, {}}));
}

Formula Formula::Exists(std::vector<Term> variables, Formula body) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kExists, {}, {std::move(body)}, std::move(variables)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const Literal& Formula::literal() const { return node_->literal; }
std::span<const Formula> Formula::children() const { return node_->children; }
const std::vector<Term>& Formula::bound_variables() const {
  return node_->bound;
}

bool Formula::ContainsExists() const {
  if (kind() == Kind::kExists) return true;
  return std::any_of(children().begin(), children().end(),
                     [](const Formula& f) { return f.ContainsExists(); });
}

bool Formula::IsSingleLiteral() const {
  if (kind() == Kind::kLiteral) return true;
  return kind() == Kind::kNot && children()[0].kind() == Kind::kLiteral;
}

std::vector<Term> Formula::FreeVariables() const {
  std::vector<Term> out;
  std::vector<Term> bound;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind() == Kind::kLiteral) {
      for (const Term& t : f.literal().atom.args) {
        if (!t.is_variable()) continue;
        if (std::find(bound.begin(), bound.end(), t) != bound.end()) continue;
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
      }
      return;
    }
    size_t mark = bound.size();
    if (f.kind() == Kind::kExists)
      bound.insert(bound.end(), f.bound_variables().begin(),
                   f.bound_variables().end());
    for (const Formula& c : f.children()) walk(c);
    bound.resize(mark);
  };
  walk(*this);
  return out;
}

void Formula::CollectLiterals(std::vector<const Literal*>& out) const {
  if (kind() == Kind::kLiteral) {
    out.push_back(&literal());
    return;
  }
  for (const Formula& c : children()) c.CollectLiterals(out);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Formula::Kind::kLiteral) return a.literal() == b.literal();
  if (a.bound_variables() != b.bound_variables()) return false;
  return std::equal(a.children().begin(), a.children().end(),
                    b.children().begin(), b.children().end());
}

// ---------------------------------------------------------------------------
// Weight / evidence

Weight Weight::Soft(double value) {
  if (!std::isfinite(value))
    throw Error(ErrorCode::kOutOfRange, "soft weight must be finite");
  return Weight(false, value);
}

void Evidence::AddTrue(GroundAtom atom) {
  if (hard_false_.contains(atom) || soft_.contains(atom))
    throw Error(ErrorCode::kInvalidProgram,
                "conflicting evidence for " + atom.ToString());
  hard_true_.insert(std::move(atom));
}

void Evidence::AddFalse(GroundAtom atom) {
  if (hard_true_.contains(atom) || soft_.contains(atom))
    throw Error(ErrorCode::kInvalidProgram,
                "conflicting evidence for " + atom.ToString());
  hard_false_.insert(std::move(atom));
}

void Evidence::AddSoft(GroundAtom atom, double probability) {
  if (!(probability > 0.0 && probability < 1.0))
    throw Error(ErrorCode::kProbabilityOutOfRange,
                "soft evidence probability must be in (0,1) for " +
                    atom.ToString());
  if (hard_true_.contains(atom) || hard_false_.contains(atom))
    throw Error(ErrorCode::kInvalidProgram,
                "conflicting evidence for " + atom.ToString());
  soft_[std::move(atom)] = probability;
}

std::optional<bool> Evidence::HardValue(const GroundAtom& atom) const {
  if (hard_true_.contains(atom)) return true;
  if (hard_false_.contains(atom)) return false;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MlnProgram

MlnProgram::MlnProgram() {
  for (std::string_view s :
       {kEntitySort, kEventSort, kStringSort, kRuleSort, kNodeSort})
    DeclareSort(std::string(s));
}

MlnProgram& MlnProgram::DeclareSort(const std::string& name) {
  if (name.empty())
    throw Error(ErrorCode::kInvalidProgram, "empty sort name");
  if (sort_index_.contains(name)) return *this;
  sort_index_.emplace(name, sorts_.size());
  sorts_.push_back({name, {}});
  sort_members_.emplace_back();
  return *this;
}

MlnProgram& MlnProgram::AddConstant(const std::string& sort,
                                    const std::string& name) {
  auto it = sort_index_.find(sort);
  if (it == sort_index_.end())
    throw Error(ErrorCode::kInvalidProgram, "unknown sort " + sort);
  if (sort_members_[it->second].insert(name).second)
    sorts_[it->second].constants.push_back(name);
  return *this;
}

MlnProgram& MlnProgram::DeclarePredicate(PredicateDecl decl) {
  if (decl.name.empty())
    throw Error(ErrorCode::kInvalidProgram, "empty predicate name");
  for (const std::string& s : decl.arg_sorts)
    if (!sort_index_.contains(s))
      throw Error(ErrorCode::kInvalidProgram,
                  "predicate " + decl.name + " uses unknown sort " + s);
  auto it = predicate_index_.find(decl.name);
  if (it != predicate_index_.end()) {
    if (predicates_[it->second] == decl) return *this;
    throw Error(ErrorCode::kInvalidProgram,
                "predicate " + decl.name + " redeclared with another signature");
  }
  predicate_index_.emplace(decl.name, predicates_.size());
  predicates_.push_back(std::move(decl));
  return *this;
}

MlnProgram& MlnProgram::AddFormula(Formula formula, Weight weight) {
  formulas_.push_back({std::move(formula), weight});
  return *this;
}

MlnProgram& MlnProgram::AddFormula(WeightedFormula wf) {
  formulas_.push_back(std::move(wf));
  return *this;
}

const SortDecl* MlnProgram::FindSort(std::string_view name) const {
  auto it = sort_index_.find(name);
  return it == sort_index_.end() ? nullptr : &sorts_[it->second];
}

bool MlnProgram::HasConstant(std::string_view sort,
                             std::string_view name) const {
  auto it = sort_index_.find(sort);
  return it != sort_index_.end() && sort_members_[it->second].contains(name);
}

const PredicateDecl* MlnProgram::FindPredicate(std::string_view name) const {
  auto it = predicate_index_.find(name);
  return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

void MlnProgram::CheckAtom(const Atom& atom) const {
  const PredicateDecl* decl = FindPredicate(atom.predicate);
  if (!decl)
    throw Error(ErrorCode::kUndeclaredPredicate, atom.predicate);
  if (decl->arity() != atom.args.size())
    throw Error(ErrorCode::kArityMismatch,
                atom.predicate + " expects " + std::to_string(decl->arity()) +
                    " arguments");
  for (size_t i = 0; i < atom.args.size(); ++i) {
    const Term& t = atom.args[i];
    if (t.sort != decl->arg_sorts[i])
      throw Error(ErrorCode::kSortMismatch,
                  t.name + " has sort " + t.sort + " but " + atom.predicate +
                      " slot " + std::to_string(i) + " expects " +
                      decl->arg_sorts[i]);
    if (!t.is_variable() && !HasConstant(t.sort, t.name))
      throw Error(ErrorCode::kUndeclaredConstant,
                  FormatConstant(t.name) + " not in domain of " + t.sort);
  }
}

void MlnProgram::CheckGroundAtom(const GroundAtom& atom) const {
  const PredicateDecl* decl = FindPredicate(atom.predicate);
  if (!decl) throw Error(ErrorCode::kUndeclaredPredicate, atom.predicate);
  if (decl->arity() != atom.args.size())
    throw Error(ErrorCode::kArityMismatch, atom.ToString());
  for (size_t i = 0; i < atom.args.size(); ++i)
    if (!HasConstant(decl->arg_sorts[i], atom.args[i]))
      throw Error(ErrorCode::kUndeclaredConstant,
                  FormatConstant(atom.args[i]) + " not in domain of " +
                      decl->arg_sorts[i]);
}

void MlnProgram::Validate() const {
  for (const WeightedFormula& wf : formulas_) {
    std::vector<const Literal*> lits;
    wf.formula.CollectLiterals(lits);
    for (const Literal* l : lits) CheckAtom(l->atom);
    // A variable must keep a single sort within a formula.
    std::map<std::string, std::string> var_sorts;
    for (const Literal* l : lits)
      for (const Term& t : l->atom.args) {
        if (!t.is_variable()) continue;
        auto [it, inserted] = var_sorts.emplace(t.name, t.sort);
        if (!inserted && it->second != t.sort)
          throw Error(ErrorCode::kSortMismatch,
                      "variable " + t.name + " used with sorts " + it->second +
                          " and " + t.sort);
      }
  }
  for (const GroundAtom& a : evidence_.hard_true()) CheckGroundAtom(a);
  for (const GroundAtom& a : evidence_.hard_false()) CheckGroundAtom(a);
  for (const auto& [a, p] : evidence_.soft()) CheckGroundAtom(a);
}

bool MlnProgram::operator==(const MlnProgram& other) const {
  return sorts_ == other.sorts_ && predicates_ == other.predicates_ &&
         formulas_ == other.formulas_ && evidence_ == other.evidence_;
}

// ---------------------------------------------------------------------------
// CNF

namespace {

Formula ToNnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kLiteral: {
      Literal l = f.literal();
      if (negate) l.negated = !l.negated;
      return Formula::Lit(std::move(l));
    }
    case K::kNot:
      return ToNnf(f.children()[0], !negate);
    case K::kAnd:
    case K::kOr: {
      std::vector<Formula> kids;
      for (const Formula& c : f.children()) kids.push_back(ToNnf(c, negate));
      bool conj = (f.kind() == K::kAnd) != negate;
      return conj ? Formula::And(std::move(kids)) : Formula::Or(std::move(kids));
    }
    case K::kImplies: {
      // a => b  ==  !a v b
      Formula rewritten =
          Formula::Or({Formula::Not(f.children()[0]), f.children()[1]});
      return ToNnf(rewritten, negate);
    }
    case K::kEquiv: {
      const Formula& a = f.children()[0];
      const Formula& b = f.children()[1];
      Formula rewritten =
          Formula::And({Formula::Implies(a, b), Formula::Implies(b, a)});
      return ToNnf(rewritten, negate);
    }
    case K::kExists:
      break;
  }
  throw Error(ErrorCode::kExistentialPresent,
              "rewrite existentials before clausification");
}

std::vector<ClauseTemplate> Distribute(const Formula& f) {
  using K = Formula::Kind;
  if (f.kind() == K::kLiteral) return {{f.literal()}};
  if (f.kind() == K::kAnd) {
    std::vector<ClauseTemplate> out;
    for (const Formula& c : f.children()) {
      auto sub = Distribute(c);
      out.insert(out.end(), std::make_move_iterator(sub.begin()),
                 std::make_move_iterator(sub.end()));
    }
    return out;
  }
  // Or: cross product of the operands' clause sets. Empty Or is false.
  std::vector<ClauseTemplate> acc = {{}};
  for (const Formula& c : f.children()) {
    auto sub = Distribute(c);
    std::vector<ClauseTemplate> next;
    next.reserve(acc.size() * sub.size());
    for (const ClauseTemplate& left : acc)
      for (const ClauseTemplate& right : sub) {
        ClauseTemplate merged = left;
        merged.insert(merged.end(), right.begin(), right.end());
        next.push_back(std::move(merged));
      }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

std::vector<ClauseTemplate> ToCnf(const Formula& formula) {
  if (formula.ContainsExists())
    throw Error(ErrorCode::kExistentialPresent,
                "rewrite existentials before clausification");
  std::vector<ClauseTemplate> raw = Distribute(ToNnf(formula, false));
  std::vector<ClauseTemplate> out;
  for (ClauseTemplate& clause : raw) {
    ClauseTemplate simplified;
    bool tautology = false;
    for (Literal& l : clause) {
      if (std::find(simplified.begin(), simplified.end(), l) !=
          simplified.end())
        continue;
      if (std::find(simplified.begin(), simplified.end(), l.Negate()) !=
          simplified.end()) {
        tautology = true;
        break;
      }
      simplified.push_back(std::move(l));
    }
    if (tautology) continue;
    if (std::find(out.begin(), out.end(), simplified) != out.end()) continue;
    out.push_back(std::move(simplified));
  }
  return out;
}

double WeightFromProbability(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::kOutOfRange,
                "probability must lie strictly inside (0,1)");
  return std::log(p / (1.0 - p));
}

double Sigmoid(double w) { return 1.0 / (1.0 + std::exp(-w)); }

MlnProgram NormalizeNegativeWeights(const MlnProgram& program) {
  MlnProgram out = program;
  for (WeightedFormula& wf : out.mutable_formulas()) {
    if (wf.weight.is_hard() || wf.weight.value() >= 0.0) continue;
    if (!wf.formula.IsSingleLiteral())
      throw Error(ErrorCode::kNegativeNonUnitWeight,
                  "negative weight on a formula that is not a single literal");
    Literal l = wf.formula.kind() == Formula::Kind::kLiteral
                    ? wf.formula.literal()
                    : wf.formula.children()[0].literal().Negate();
    wf = {Formula::Lit(l.Negate()), Weight::Soft(-wf.weight.value())};
  }
  return out;
}

}  // namespace mlnqa
