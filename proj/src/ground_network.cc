#include "mlnqa/ground_network.h"

#include <algorithm>
#include <sstream>

#include "mlnqa/error.h"
#include "mlnqa/parser.h"

namespace mlnqa {

std::optional<GroundClause> GroundClause::Make(
    std::vector<GroundLiteral> literals, Weight weight, int provenance) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  for (size_t i = 1; i < literals.size(); ++i)
    if (literals[i].atom == literals[i - 1].atom) return std::nullopt;
  return GroundClause(std::move(literals), weight, provenance);
}

AtomId GroundNetwork::InternAtom(const GroundAtom& atom) {
  auto [it, inserted] = index_.emplace(atom, static_cast<AtomId>(atoms_.size()));
  if (inserted) {
    atoms_.push_back(atom);
    frozen_.push_back(FrozenState::kFree);
    soft_evidence_.push_back(false);
  }
  return it->second;
}

std::optional<AtomId> GroundNetwork::FindAtom(const GroundAtom& atom) const {
  auto it = index_.find(atom);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GroundNetwork::Freeze(AtomId id, bool value) {
  FrozenState want = value ? FrozenState::kTrue : FrozenState::kFalse;
  if (frozen_[id] == want) return;
  if (frozen_[id] != FrozenState::kFree)
    throw Error(ErrorCode::kHardContradiction,
                "atom " + atoms_[id].ToString() + " frozen to both values");
  frozen_[id] = want;
}

void GroundNetwork::AddHard(std::vector<GroundLiteral> literals,
                            int provenance) {
  if (literals.empty())
    throw Error(ErrorCode::kHardContradiction, "empty hard clause");
  auto clause = GroundClause::Make(std::move(literals), Weight::Hard(), provenance);
  if (!clause) return;
  if (hard_index_.contains(clause->literals())) return;
  hard_index_.emplace(clause->literals(), hard_.size());
  hard_.push_back(std::move(*clause));
}

void GroundNetwork::AddSoft(std::vector<GroundLiteral> literals, double weight,
                            int provenance) {
  if (weight == 0.0 || literals.empty()) return;
  auto clause = GroundClause::Make(std::move(literals), Weight::Soft(weight),
                                   provenance);
  if (!clause) return;
  if (weight < 0.0) {
    if (clause->size() != 1)
      throw Error(ErrorCode::kNegativeNonUnitWeight,
                  "negative weight on a non-unit ground clause");
    clause = GroundClause::Make({clause->literals()[0].Negate()},
                                Weight::Soft(-weight), provenance);
    weight = -weight;
  }
  if (auto it = soft_index_.find(clause->literals()); it != soft_index_.end()) {
    GroundClause& existing = soft_[it->second];
    existing.weight_ = Weight::Soft(existing.weight_.value() + weight);
    return;
  }
  soft_index_.emplace(clause->literals(), soft_.size());
  soft_.push_back(std::move(*clause));
}

void GroundNetwork::Simplify() {
  auto reduce = [&](const GroundClause& c, bool& satisfied) {
    std::vector<GroundLiteral> kept;
    satisfied = false;
    for (const GroundLiteral& l : c.literals()) {
      FrozenState f = frozen_[l.atom];
      if (f == FrozenState::kFree) {
        kept.push_back(l);
        continue;
      }
      if (l.SatisfiedBy(f == FrozenState::kTrue)) {
        satisfied = true;
        break;
      }
    }
    return kept;
  };
  std::vector<GroundClause> old_hard = std::move(hard_);
  std::vector<GroundClause> old_soft = std::move(soft_);
  hard_.clear();
  soft_.clear();
  hard_index_.clear();
  soft_index_.clear();
  for (const GroundClause& c : old_hard) {
    bool satisfied = false;
    auto kept = reduce(c, satisfied);
    if (satisfied) continue;
    if (kept.empty())
      throw Error(ErrorCode::kHardContradiction,
                  "hard clause falsified by frozen atoms");
    AddHard(std::move(kept), c.provenance());
  }
  for (const GroundClause& c : old_soft) {
    bool satisfied = false;
    auto kept = reduce(c, satisfied);
    if (satisfied || kept.empty()) continue;
    std::sort(kept.begin(), kept.end());
    // A soft clause implied by an identical hard clause is constant.
    if (hard_index_.contains(kept)) continue;
    AddSoft(std::move(kept), c.weight().value(), c.provenance());
  }
}

size_t GroundNetwork::NumFreeAtoms() const {
  return static_cast<size_t>(
      std::count(frozen_.begin(), frozen_.end(), FrozenState::kFree));
}

GroundStats GroundNetwork::Stats() const {
  return {atoms_.size(), NumFreeAtoms(), hard_.size(), soft_.size()};
}

std::string GroundNetwork::LiteralToString(const GroundLiteral& l) const {
  return (l.negated ? "!" : "") + atoms_[l.atom].ToString();
}

std::string GroundNetwork::Dump() const {
  std::ostringstream out;
  auto write = [&](const GroundClause& c) {
    out << (c.is_hard() ? std::string("HARD") : FormatNumber(c.weight().value()));
    for (const GroundLiteral& l : c.literals()) out << " " << LiteralToString(l);
    out << "\n";
  };
  for (const GroundClause& c : hard_) write(c);
  for (const GroundClause& c : soft_) write(c);
  return out.str();
}

}  // namespace mlnqa
