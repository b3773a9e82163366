#ifndef MLNQA_SAT_H_
#define MLNQA_SAT_H_

// Conflict-driven clause learning SAT solver with watched literals, VSIDS,
// phase saving, Luby restarts and solving under assumptions.
//
// Literals use DIMACS conventions: variable v >= 1 appears as +v or -v.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mlnqa {

enum class SatStatus { kSat, kUnsat };

class SatInstance {
 public:
  SatInstance();
  ~SatInstance();
  SatInstance(SatInstance&&) noexcept;
  SatInstance& operator=(SatInstance&&) noexcept;
  SatInstance(const SatInstance&) = delete;
  SatInstance& operator=(const SatInstance&) = delete;

  /// Grows the variable range so that `var` is valid.
  void EnsureVariable(int var);
  int num_variables() const;

  /// Clauses are immutable once added. Returns false once the instance is
  /// known to be unsatisfiable without assumptions.
  bool AddClause(std::span<const int> literals);
  bool AddClause(std::initializer_list<int> literals) {
    return AddClause(std::span<const int>(literals.begin(), literals.size()));
  }

  SatStatus Solve(std::span<const int> assumptions = {});
  SatStatus Solve(std::initializer_list<int> assumptions) {
    return Solve(std::span<const int>(assumptions.begin(), assumptions.size()));
  }

  /// Value of `var` in the last model; valid after Solve returned kSat.
  bool ModelValue(int var) const;
  /// Total assignment from the last kSat call, indexed by variable (slot 0
  /// unused).
  const std::vector<bool>& model() const;

  uint64_t conflicts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mlnqa

#endif  // MLNQA_SAT_H_
