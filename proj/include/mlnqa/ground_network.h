#ifndef MLNQA_GROUND_NETWORK_H_
#define MLNQA_GROUND_NETWORK_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlnqa/logic.h"

namespace mlnqa {

using AtomId = uint32_t;

enum class FrozenState : uint8_t { kFree, kTrue, kFalse };

struct GroundLiteral {
  AtomId atom = 0;
  bool negated = false;

  bool SatisfiedBy(bool value) const { return value != negated; }
  GroundLiteral Negate() const { return {atom, !negated}; }
  auto operator<=>(const GroundLiteral&) const = default;
};

inline constexpr int kEvidenceProvenance = -1;

/// Canonical ground clause: literals sorted by atom, no duplicates, never a
/// tautology.
class GroundClause {
 public:
  /// Returns nullopt if the literals contain both l and !l.
  static std::optional<GroundClause> Make(std::vector<GroundLiteral> literals,
                                          Weight weight,
                                          int provenance = kEvidenceProvenance);

  const std::vector<GroundLiteral>& literals() const { return literals_; }
  Weight weight() const { return weight_; }
  bool is_hard() const { return weight_.is_hard(); }
  int provenance() const { return provenance_; }
  size_t size() const { return literals_.size(); }

  bool SatisfiedBy(const std::vector<bool>& assignment) const {
    for (const GroundLiteral& l : literals_)
      if (l.SatisfiedBy(assignment[l.atom])) return true;
    return false;
  }

 private:
  friend class GroundNetwork;
  GroundClause(std::vector<GroundLiteral> literals, Weight weight, int provenance)
      : literals_(std::move(literals)), weight_(weight), provenance_(provenance) {}

  std::vector<GroundLiteral> literals_;
  Weight weight_;
  int provenance_;
};

struct GroundStats {
  size_t atoms = 0;
  size_t free_atoms = 0;
  size_t hard_clauses = 0;
  size_t soft_clauses = 0;

  size_t clauses() const { return hard_clauses + soft_clauses; }
};

/// Ground atoms with dense ids, frozen values, and the hard/soft clause sets.
class GroundNetwork {
 public:
  AtomId InternAtom(const GroundAtom& atom);
  std::optional<AtomId> FindAtom(const GroundAtom& atom) const;
  const GroundAtom& atom(AtomId id) const { return atoms_[id]; }
  size_t num_atoms() const { return atoms_.size(); }

  FrozenState frozen(AtomId id) const { return frozen_[id]; }
  bool is_frozen(AtomId id) const { return frozen_[id] != FrozenState::kFree; }
  /// A frozen state is set at most once; re-freezing to the same value is a
  /// no-op, to the opposite value a HardContradiction.
  void Freeze(AtomId id, bool value);

  bool is_soft_evidence(AtomId id) const { return soft_evidence_[id]; }
  void MarkSoftEvidence(AtomId id) { soft_evidence_[id] = true; }

  /// Adds a hard clause. Tautologies vanish, duplicates are merged and an
  /// empty clause throws HardContradiction.
  void AddHard(std::vector<GroundLiteral> literals,
               int provenance = kEvidenceProvenance);
  /// Adds a soft clause with weight w. w == 0 and empty clauses are dropped;
  /// a negative unit becomes its negation with -w; a negative non-unit clause
  /// throws NegativeNonUnitWeight. Duplicates add their weights.
  void AddSoft(std::vector<GroundLiteral> literals, double weight,
               int provenance = kEvidenceProvenance);

  const std::vector<GroundClause>& hard_clauses() const { return hard_; }
  const std::vector<GroundClause>& soft_clauses() const { return soft_; }

  /// Removes frozen atoms from all clauses: satisfied clauses are dropped,
  /// false literals removed. Also drops soft clauses that duplicate a hard
  /// clause. Throws HardContradiction on an empty hard clause.
  void Simplify();

  size_t NumFreeAtoms() const;
  GroundStats Stats() const;

  /// One clause per line: `HARD lit lit ...` or `<w> lit lit ...`.
  std::string Dump() const;
  std::string LiteralToString(const GroundLiteral& l) const;

 private:
  using Key = std::vector<GroundLiteral>;

  std::vector<GroundAtom> atoms_;
  std::map<GroundAtom, AtomId> index_;
  std::vector<FrozenState> frozen_;
  std::vector<bool> soft_evidence_;
  std::vector<GroundClause> hard_;
  std::vector<GroundClause> soft_;
  std::map<Key, size_t> hard_index_;
  std::map<Key, size_t> soft_index_;
};

}  // namespace mlnqa

#endif  // MLNQA_GROUND_NETWORK_H_
