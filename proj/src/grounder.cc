#include "mlnqa/grounder.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mlnqa/error.h"

namespace mlnqa {
namespace {

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string> SortedDomain(const MlnProgram& program,
                                      const std::string& sort) {
  const SortDecl* decl = program.FindSort(sort);
  if (!decl || decl->constants.empty())
    throw Error(ErrorCode::kEmptyDomain, "sort '" + sort + "' has no constants");
  std::vector<std::string> out = decl->constants;
  std::sort(out.begin(), out.end());
  return out;
}

// ln(e^w - 1) for w > 0, stable for large w.
double AuxWeight(double w) {
  if (w > 30.0) return w + std::log1p(-std::exp(-w));
  return std::log(std::expm1(w));
}

class Grounder {
 public:
  Grounder(const MlnProgram& program, GroundNetwork& net,
           const GroundingOptions& options)
      : program_(program), net_(net), options_(options) {
    for (const PredicateDecl& p : program.predicates())
      closed_world_[p.name] = p.closed_world;
  }

  void AddEvidence() {
    const Evidence& ev = program_.evidence();
    for (const GroundAtom& a : ev.hard_true()) net_.Freeze(net_.InternAtom(a), true);
    for (const GroundAtom& a : ev.hard_false()) net_.Freeze(net_.InternAtom(a), false);
    for (const auto& [a, p] : ev.soft()) {
      AtomId id = net_.InternAtom(a);
      net_.MarkSoftEvidence(id);
      net_.AddSoft({{id, false}}, WeightFromProbability(p), kEvidenceProvenance);
    }
  }

  void GroundFormula(size_t index) {
    const WeightedFormula& wf = program_.formulas()[index];
    std::vector<ClauseTemplate> cnf = ToCnf(wf.formula);
    int prov = static_cast<int>(index);
    if (cnf.empty()) return;  // tautology
    if (wf.weight.is_hard()) {
      for (const ClauseTemplate& c : cnf) GroundHardClause(c, prov);
      return;
    }
    double w = wf.weight.value();
    if (w == 0.0) return;
    if (cnf.size() == 1) {
      GroundSoftClause(cnf[0], wf.formula.FreeVariables(), w, prov);
      return;
    }
    GroundSoftConjunction(cnf, wf.formula.FreeVariables(), w, prov);
  }

 private:
  struct Instance {
    std::vector<Term> vars;
    std::vector<std::vector<std::string>> domains;
    std::vector<std::string> binding;
  };

  Instance MakeInstance(const std::vector<Term>& vars) {
    Instance inst;
    inst.vars = vars;
    for (const Term& v : vars) inst.domains.push_back(SortedDomain(program_, v.sort));
    inst.binding.resize(vars.size());
    return inst;
  }

  static std::vector<Term> ClauseVariables(const ClauseTemplate& clause) {
    std::vector<Term> vars;
    for (const Literal& l : clause)
      for (const Term& t : l.atom.args)
        if (t.is_variable() &&
            std::none_of(vars.begin(), vars.end(),
                         [&](const Term& v) { return v.name == t.name; }))
          vars.push_back(t);
    return vars;
  }

  static int VarIndex(const Instance& inst, const std::string& name) {
    for (size_t i = 0; i < inst.vars.size(); ++i)
      if (inst.vars[i].name == name) return static_cast<int>(i);
    return -1;
  }

  GroundAtom Instantiate(const Atom& atom, const Instance& inst) const {
    GroundAtom g{atom.predicate, {}};
    g.args.reserve(atom.args.size());
    for (const Term& t : atom.args)
      g.args.push_back(t.is_variable() ? inst.binding[VarIndex(inst, t.name)]
                                       : t.name);
    return g;
  }

  // Frozen value of a ground atom, interning it when evidence or the
  // closed-world assumption fixes it.
  std::optional<bool> Known(const GroundAtom& atom) {
    if (auto id = net_.FindAtom(atom)) {
      FrozenState f = net_.frozen(*id);
      if (f == FrozenState::kFree) return std::nullopt;
      return f == FrozenState::kTrue;
    }
    const Evidence& ev = program_.evidence();
    if (auto hv = ev.HardValue(atom)) {
      net_.Freeze(net_.InternAtom(atom), *hv);
      return hv;
    }
    auto cw = closed_world_.find(atom.predicate);
    if (cw != closed_world_.end() && cw->second && !ev.HasSoft(atom)) {
      net_.Freeze(net_.InternAtom(atom), false);
      return false;
    }
    return std::nullopt;
  }

  void CheckDeadline() {
    if (!options_.deadline || (++ticks_ & 0xFFF) != 0) return;
    if (std::chrono::steady_clock::now() > *options_.deadline)
      throw Error(ErrorCode::kTimeout, "grounding exceeded its time limit");
  }

  // Instantiates one clause template over its own variables and calls `emit`
  // with the simplified literals of every instance not already satisfied.
  void ForEachClauseInstance(
      const ClauseTemplate& clause,
      const std::function<void(std::vector<GroundLiteral>)>& emit) {
    Instance inst = MakeInstance(ClauseVariables(clause));
    const size_t n = clause.size();
    // Depth after which each literal is fully bound (-1: ground).
    std::vector<int> ready(n, -1);
    for (size_t i = 0; i < n; ++i)
      for (const Term& t : clause[i].atom.args)
        if (t.is_variable()) ready[i] = std::max(ready[i], VarIndex(inst, t.name));
    std::vector<GroundAtom> atoms(n);
    std::vector<std::optional<bool>> known(n);

    auto settle = [&](int depth) {
      for (size_t i = 0; i < n; ++i) {
        if (ready[i] != depth) continue;
        atoms[i] = Instantiate(clause[i].atom, inst);
        known[i] = Known(atoms[i]);
        if (known[i] && *known[i] != clause[i].negated) return true;
      }
      return false;
    };
    if (settle(-1)) return;

    std::function<void(size_t)> rec = [&](size_t depth) {
      if (depth == inst.vars.size()) {
        CheckDeadline();
        std::vector<GroundLiteral> lits;
        for (size_t i = 0; i < n; ++i)
          if (!known[i]) lits.push_back({net_.InternAtom(atoms[i]), clause[i].negated});
        emit(std::move(lits));
        return;
      }
      for (const std::string& c : inst.domains[depth]) {
        inst.binding[depth] = c;
        if (settle(static_cast<int>(depth))) continue;
        rec(depth + 1);
      }
    };
    rec(0);
  }

  void GroundHardClause(const ClauseTemplate& clause, int prov) {
    ForEachClauseInstance(clause, [&](std::vector<GroundLiteral> lits) {
      if (lits.empty())
        throw Error(ErrorCode::kHardContradiction,
                    "hard formula " + std::to_string(prov) +
                        " is violated by the evidence");
      net_.AddHard(std::move(lits), prov);
    });
  }

  void GroundSoftClause(const ClauseTemplate& clause,
                        const std::vector<Term>& formula_vars, double w,
                        int prov) {
    // Formula variables that vanished from the clause multiply its count.
    std::vector<Term> clause_vars = ClauseVariables(clause);
    for (const Term& v : formula_vars)
      if (std::none_of(clause_vars.begin(), clause_vars.end(),
                       [&](const Term& t) { return t.name == v.name; }))
        w *= static_cast<double>(SortedDomain(program_, v.sort).size());
    ForEachClauseInstance(clause, [&](std::vector<GroundLiteral> lits) {
      AddWeightedClauses({std::move(lits)}, w, prov);
    });
  }

  void GroundSoftConjunction(const std::vector<ClauseTemplate>& cnf,
                             const std::vector<Term>& formula_vars, double w,
                             int prov) {
    Instance inst = MakeInstance(formula_vars);
    std::function<void(size_t)> rec = [&](size_t depth) {
      if (depth < inst.vars.size()) {
        for (const std::string& c : inst.domains[depth]) {
          inst.binding[depth] = c;
          rec(depth + 1);
        }
        return;
      }
      CheckDeadline();
      std::vector<std::vector<GroundLiteral>> open;
      for (const ClauseTemplate& clause : cnf) {
        std::vector<GroundLiteral> lits;
        bool satisfied = false;
        for (const Literal& l : clause) {
          GroundAtom a = Instantiate(l.atom, inst);
          std::optional<bool> k = Known(a);
          if (!k) {
            lits.push_back({net_.InternAtom(a), l.negated});
          } else if (*k != l.negated) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (lits.empty()) return;  // formula false here: constant factor
        open.push_back(std::move(lits));
      }
      if (!open.empty()) AddWeightedClauses(std::move(open), w, prov);
    };
    rec(0);
  }

  // Adds weight w on the conjunction of `clauses`.
  void AddWeightedClauses(std::vector<std::vector<GroundLiteral>> clauses,
                          double w, int prov) {
    if (clauses.size() == 1) {
      std::vector<GroundLiteral>& c = clauses[0];
      if (c.empty()) return;
      if (w > 0.0 || c.size() == 1) {
        net_.AddSoft(std::move(c), w, prov);
        return;
      }
      // w on (l1 v .. v lk) equals -w on (!l1 ^ .. ^ !lk).
      std::vector<std::vector<GroundLiteral>> units;
      for (const GroundLiteral& l : c) units.push_back({l.Negate()});
      AddWeightedClauses(std::move(units), -w, prov);
      return;
    }
    if (w < 0.0)
      throw Error(ErrorCode::kNegativeNonUnitWeight,
                  "negative weight on a formula with several clauses");
    AtomId t = net_.InternAtom(GroundAtom{std::string(kAuxPredicate),
                                          {std::to_string(aux_count_++)}});
    for (auto& c : clauses) {
      c.push_back({t, true});
      net_.AddHard(std::move(c), prov);
    }
    net_.AddSoft({{t, false}}, AuxWeight(w), prov);
  }

  const MlnProgram& program_;
  GroundNetwork& net_;
  GroundingOptions options_;
  std::map<std::string, bool, std::less<>> closed_world_;
  size_t aux_count_ = 0;
  uint64_t ticks_ = 0;
};

std::string FreshName(const MlnProgram& program, const std::string& base) {
  auto taken = [&](const std::string& name) {
    for (const SortDecl& s : program.sorts())
      if (std::find(s.constants.begin(), s.constants.end(), name) != s.constants.end())
        return true;
    return false;
  };
  if (!taken(base)) return base;
  for (int i = 2;; ++i) {
    std::string name = base + "_" + std::to_string(i);
    if (!taken(name)) return name;
  }
}

void RequireNoExists(const Formula& f) {
  if (f.ContainsExists())
    throw Error(ErrorCode::kUnsupportedExistential,
                "existential quantifier outside a rule consequent");
}

}  // namespace

MlnProgram RewriteExistentials(const MlnProgram& program) {
  MlnProgram out = program;
  std::vector<WeightedFormula> formulas;
  int rule_count = 0;
  for (const WeightedFormula& wf : program.formulas()) {
    const Formula& f = wf.formula;
    if (!f.ContainsExists()) {
      formulas.push_back(wf);
      continue;
    }
    std::optional<Formula> ante;
    const Formula* ex = &f;
    if (f.kind() == Formula::Kind::kImplies) {
      RequireNoExists(f.children()[0]);
      ante = f.children()[0];
      ex = &f.children()[1];
    }
    if (ex->kind() != Formula::Kind::kExists)
      throw Error(ErrorCode::kUnsupportedExistential,
                  "existential quantifier must prefix the rule consequent");
    const Formula& body = ex->children()[0];
    RequireNoExists(body);
    const std::vector<Term>& ys = ex->bound_variables();

    ++rule_count;
    std::string pred = "E" + std::to_string(rule_count);
    for (int k = 2; out.FindPredicate(pred); ++k)
      pred = "E" + std::to_string(rule_count) + "_" + std::to_string(k);
    std::vector<Term> xs = f.FreeVariables();
    PredicateDecl decl{pred, {}, false};
    for (const Term& t : xs) decl.arg_sorts.push_back(t.sort);
    for (const Term& t : ys) decl.arg_sorts.push_back(t.sort);
    out.DeclarePredicate(decl);

    for (const Term& y : ys) {
      std::string base = y.name;
      base[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
      out.AddConstant(y.sort, FreshName(out, base + std::to_string(rule_count)));
    }

    // ante => OR over every constant tuple for ys.
    std::vector<std::vector<std::string>> domains;
    for (const Term& y : ys) domains.push_back(SortedDomain(out, y.sort));
    std::vector<Formula> disjuncts;
    std::vector<std::string> tuple(ys.size());
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == ys.size()) {
        Atom a{pred, xs};
        for (size_t j = 0; j < ys.size(); ++j)
          a.args.push_back(Term::Constant(tuple[j], ys[j].sort));
        disjuncts.push_back(Formula::Lit(std::move(a)));
        return;
      }
      for (const std::string& c : domains[i]) {
        tuple[i] = c;
        rec(i + 1);
      }
    };
    rec(0);
    Formula consequent =
        disjuncts.size() == 1 ? disjuncts[0] : Formula::Or(std::move(disjuncts));
    formulas.push_back({ante ? Formula::Implies(*ante, consequent) : consequent,
                        wf.weight});

    Atom def{pred, xs};
    for (const Term& y : ys) def.args.push_back(y);
    formulas.push_back({Formula::Equiv(Formula::Lit(std::move(def)), body),
                        Weight::Hard()});
  }
  out.mutable_formulas() = std::move(formulas);
  return out;
}

MlnProgram RefinedTypeRules(const MlnProgram& program,
                            const EntailmentTable& table) {
  std::map<std::string, std::string> isa_for_sort;
  for (const PredicateDecl& p : program.predicates())
    if (StartsWith(p.name, "isa") && p.arity() == 2 &&
        p.arg_sorts[1] == kStringSort && !isa_for_sort.contains(p.arg_sorts[0]))
      isa_for_sort[p.arg_sorts[0]] = p.name;
  const SortDecl* strings = program.FindSort(kStringSort);
  if (isa_for_sort.empty() || !strings) return program;

  const Evidence& ev = program.evidence();
  auto evidence_strings = [&](const std::string& isa, const std::string& c) {
    std::set<std::string> out;
    for (const GroundAtom& a : ev.hard_true())
      if (a.predicate == isa && a.args[0] == c) out.insert(a.args[1]);
    return out;
  };

  MlnProgram out = program;
  for (const PredicateDecl& r : program.predicates()) {
    if (r.arity() != 2 || StartsWith(r.name, "isa") ||
        StartsWith(r.name, "entails") || StartsWith(r.name, "sameAs"))
      continue;
    auto isa_it = isa_for_sort.find(r.arg_sorts[1]);
    if (isa_it == isa_for_sort.end()) continue;
    const std::string& isa = isa_it->second;

    std::set<std::string> tied;
    bool restricted = true;
    bool seen = false;
    auto note = [&](const std::set<std::string>& s) {
      seen = true;
      if (s.empty()) restricted = false;
      tied.insert(s.begin(), s.end());
    };
    for (const GroundAtom& a : ev.hard_true())
      if (a.predicate == r.name) note(evidence_strings(isa, a.args[1]));
    for (const auto& [a, p] : ev.soft())
      if (a.predicate == r.name) note(evidence_strings(isa, a.args[1]));
    for (const WeightedFormula& wf : program.formulas()) {
      std::vector<const Literal*> lits;
      wf.formula.CollectLiterals(lits);
      for (const Literal* l : lits) {
        if (l->atom.predicate != r.name) continue;
        const Term& second = l->atom.args[1];
        std::set<std::string> s;
        if (!second.is_variable()) s = evidence_strings(isa, second.name);
        for (const Literal* m : lits)
          if (m->atom.predicate == isa && m->atom.args[0] == second &&
              !m->atom.args[1].is_variable())
            s.insert(m->atom.args[1].name);
        note(s);
      }
    }
    if (!seen || !restricted || tied.empty()) continue;

    std::vector<std::string> candidates = strings->constants;
    std::sort(candidates.begin(), candidates.end());
    for (const std::string& s : candidates) {
      bool unrelated = std::all_of(tied.begin(), tied.end(), [&](const std::string& t) {
        return table.Score(t, s) == 0.0 && table.Score(s, t) == 0.0;
      });
      if (!unrelated) continue;
      Term x = Term::Variable("x", r.arg_sorts[0]);
      Term y = Term::Variable("y", r.arg_sorts[1]);
      Formula rule = Formula::Implies(
          Formula::Lit(Atom{r.name, {x, y}}),
          Formula::Lit(Atom{isa, {y, Term::Constant(s, std::string(kStringSort))}},
                       true));
      out.AddFormula(std::move(rule), Weight::Hard());
    }
  }
  return out;
}

GroundNetwork Ground(const MlnProgram& program, const GroundingOptions& options) {
  GroundNetwork net;
  Grounder g(program, net, options);
  g.AddEvidence();
  for (size_t i = 0; i < program.formulas().size(); ++i) g.GroundFormula(i);
  net.Simplify();
  return net;
}

GroundNetwork GroundReduced(const MlnProgram& program, ReductionReport* report,
                            const GroundingOptions& options) {
  GroundNetwork net;
  Grounder g(program, net, options);
  g.AddEvidence();
  IncrementalFreezer freezer(net);
  if (report) report->steps.clear();
  const auto& formulas = program.formulas();
  for (size_t i = 0; i < formulas.size(); ++i) {
    if (!formulas[i].weight.is_hard()) continue;
    size_t first = net.hard_clauses().size();
    g.GroundFormula(i);
    ReductionStep step;
    step.formula = static_cast<int>(i);
    for (size_t k = first; k < net.hard_clauses().size(); ++k)
      if (freezer.Add(net.hard_clauses()[k])) ++step.clauses_added;
    step.frozen = freezer.FreezeBackbone();
    if (report) report->steps.push_back(step);
  }
  for (size_t i = 0; i < formulas.size(); ++i)
    if (!formulas[i].weight.is_hard()) g.GroundFormula(i);
  // Soft conjunctions may have introduced hard definitions of aux atoms.
  for (const GroundClause& c : net.hard_clauses()) freezer.Add(c);
  freezer.FreezeBackbone();
  if (report) report->before = net.Stats();
  net.Simplify();
  if (report) report->after = net.Stats();
  return net;
}

}  // namespace mlnqa
