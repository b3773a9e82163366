#ifndef MLNQA_GROUNDER_H_
#define MLNQA_GROUNDER_H_

#include <chrono>
#include <optional>

#include "mlnqa/backbone.h"
#include "mlnqa/entailment.h"
#include "mlnqa/ground_network.h"
#include "mlnqa/logic.h"

namespace mlnqa {

/// Predicate used for the definitional atoms of multi-clause soft formulas.
inline constexpr std::string_view kAuxPredicate = "$aux";

struct GroundingOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Replaces `ante => EXIST y (C)` (or a bare `EXIST y (C)`) by
/// `ante => OR_c E(x, c)` plus the hard definition `E(x, y) <=> C`.
/// One fresh constant per existential variable is added to its sort.
MlnProgram RewriteExistentials(const MlnProgram& program);

/// Adds hard `r(x,y) => !isa(y,"s")` for strings s that have zero
/// entailment score, in both directions, with every string that r's second
/// argument is ever tied to.
MlnProgram RefinedTypeRules(const MlnProgram& program,
                            const EntailmentTable& table);

/// Full typed grounding, simplified against hard evidence and closed-world
/// predicates. Soft evidence becomes a unit clause of weight ln(p/(1-p)).
GroundNetwork Ground(const MlnProgram& program,
                     const GroundingOptions& options = {});

/// Grounds hard formulas one at a time, freezing the backbone of the
/// accumulation after each, then grounds soft formulas against the frozen
/// atoms. Same result as ReduceGrounding(Ground(program)) up to clause order.
GroundNetwork GroundReduced(const MlnProgram& program,
                            ReductionReport* report = nullptr,
                            const GroundingOptions& options = {});

}  // namespace mlnqa

#endif  // MLNQA_GROUNDER_H_
