#ifndef MLNQA_BACKBONE_H_
#define MLNQA_BACKBONE_H_

// Backbone extraction and the incremental hard-constraint freezing that
// shrinks a ground network without changing its distribution.

#include <map>
#include <set>
#include <vector>

#include "mlnqa/ground_network.h"
#include "mlnqa/sat.h"

namespace mlnqa {

/// Variable -> forced value. Every entry holds in all models.
using BackboneSet = std::map<int, bool>;

/// Backbone of a DIMACS clause set, restricted to variables that occur in it.
/// Throws Unsatisfiable.
BackboneSet ComputeBackbone(const std::vector<std::vector<int>>& clauses);

/// Backbone of `instance` over `candidates` (variables). The instance must be
/// satisfiable; unit clauses for the backbone literals are added to it.
BackboneSet ComputeBackbone(SatInstance& instance, const std::vector<int>& candidates);

struct ReductionStep {
  int formula = 0;          // provenance index of the hard formula
  size_t clauses_added = 0; // after simplification by earlier freezes
  size_t frozen = 0;        // atoms frozen by this step
};

struct ReductionReport {
  GroundStats before;
  GroundStats after;
  std::vector<ReductionStep> steps;
  size_t total_frozen() const;
};

/// Accumulates hard clauses and freezes the backbone of the accumulation in
/// the target network. Atoms carrying soft evidence are never frozen.
class IncrementalFreezer {
 public:
  explicit IncrementalFreezer(GroundNetwork& network) : network_(network) {}

  /// Adds one hard clause, simplified by the atoms frozen so far.
  /// Returns false if it was already satisfied.
  bool Add(const GroundClause& clause);
  /// Freezes the backbone of everything added so far. Returns the number of
  /// newly frozen atoms. Throws HardContradiction if the accumulation is
  /// unsatisfiable.
  size_t FreezeBackbone();

 private:
  GroundNetwork& network_;
  SatInstance sat_;
  std::set<AtomId> seen_atoms_;
  std::set<AtomId> pinned_;  // frozen atoms already added as units
  bool dirty_ = false;
};

/// Freezes backbone atoms formula by formula (ascending provenance), then
/// simplifies hard and soft clauses against all frozen atoms. The
/// distribution over the remaining free atoms is unchanged.
GroundNetwork ReduceGrounding(const GroundNetwork& network,
                              ReductionReport* report = nullptr);

}  // namespace mlnqa

#endif  // MLNQA_BACKBONE_H_
