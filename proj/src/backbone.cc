#include "mlnqa/backbone.h"

#include <algorithm>
#include <cstdlib>

#include "mlnqa/error.h"

namespace mlnqa {

BackboneSet ComputeBackbone(SatInstance& instance,
                            const std::vector<int>& candidates) {
  BackboneSet result;
  if (instance.Solve() != SatStatus::kSat)
    throw Error(ErrorCode::kUnsatisfiable, "clause set has no model");
  std::map<int, bool> open;
  for (int v : candidates) open[v] = instance.ModelValue(v);
  while (!open.empty()) {
    auto [var, value] = *open.begin();
    int flipped = value ? -var : var;
    if (instance.Solve({flipped}) == SatStatus::kUnsat) {
      result[var] = value;
      open.erase(open.begin());
      int unit = value ? var : -var;
      instance.AddClause({unit});
      continue;
    }
    // The new model refutes every candidate it disagrees with.
    for (auto it = open.begin(); it != open.end();) {
      if (instance.ModelValue(it->first) != it->second)
        it = open.erase(it);
      else
        ++it;
    }
  }
  return result;
}

BackboneSet ComputeBackbone(const std::vector<std::vector<int>>& clauses) {
  SatInstance instance;
  std::set<int> vars;
  for (const auto& c : clauses) {
    for (int l : c) vars.insert(std::abs(l));
    instance.AddClause(c);
  }
  return ComputeBackbone(instance, std::vector<int>(vars.begin(), vars.end()));
}

size_t ReductionReport::total_frozen() const {
  size_t n = 0;
  for (const ReductionStep& s : steps) n += s.frozen;
  return n;
}

bool IncrementalFreezer::Add(const GroundClause& clause) {
  std::vector<int> lits;
  for (const GroundLiteral& l : clause.literals()) {
    FrozenState f = network_.frozen(l.atom);
    if (f == FrozenState::kFree) {
      int var = static_cast<int>(l.atom) + 1;
      lits.push_back(l.negated ? -var : var);
      continue;
    }
    if (l.SatisfiedBy(f == FrozenState::kTrue)) return false;
  }
  if (lits.empty())
    throw Error(ErrorCode::kHardContradiction,
                "hard clause falsified by frozen atoms");
  for (int l : lits) seen_atoms_.insert(static_cast<AtomId>(std::abs(l) - 1));
  sat_.AddClause(lits);
  dirty_ = true;
  return true;
}

size_t IncrementalFreezer::FreezeBackbone() {
  if (!dirty_) return 0;
  dirty_ = false;
  // Earlier clauses may still mention atoms frozen since they were added.
  for (AtomId a : seen_atoms_) {
    if (!network_.is_frozen(a) || pinned_.contains(a)) continue;
    int var = static_cast<int>(a) + 1;
    sat_.AddClause({network_.frozen(a) == FrozenState::kTrue ? var : -var});
    pinned_.insert(a);
  }
  std::vector<int> candidates;
  for (AtomId a : seen_atoms_)
    if (!network_.is_frozen(a) && !network_.is_soft_evidence(a))
      candidates.push_back(static_cast<int>(a) + 1);
  BackboneSet backbone;
  try {
    backbone = ComputeBackbone(sat_, candidates);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnsatisfiable) throw;
    throw Error(ErrorCode::kHardContradiction, "hard constraints are unsatisfiable");
  }
  for (auto [var, value] : backbone) {
    AtomId a = static_cast<AtomId>(var - 1);
    network_.Freeze(a, value);
    pinned_.insert(a);  // ComputeBackbone added the unit already
  }
  return backbone.size();
}

GroundNetwork ReduceGrounding(const GroundNetwork& network,
                              ReductionReport* report) {
  GroundNetwork out = network;
  if (report) {
    report->before = network.Stats();
    report->steps.clear();
  }
  std::map<int, std::vector<const GroundClause*>> by_formula;
  for (const GroundClause& c : network.hard_clauses())
    by_formula[c.provenance()].push_back(&c);

  IncrementalFreezer freezer(out);
  for (const auto& [formula, clauses] : by_formula) {
    ReductionStep step;
    step.formula = formula;
    for (const GroundClause* c : clauses)
      if (freezer.Add(*c)) ++step.clauses_added;
    step.frozen = freezer.FreezeBackbone();
    if (report) report->steps.push_back(step);
  }
  out.Simplify();
  if (report) report->after = out.Stats();
  return out;
}

}  // namespace mlnqa
