#ifndef MLNQA_SRC_SAMPLE_SAT_H_
#define MLNQA_SRC_SAMPLE_SAT_H_

#include <cstdint>
#include <vector>

#include "mlnqa/inference.h"

namespace mlnqa {

// Reusable SampleSAT state. Reset() installs a clause set; Sample() draws one
// solution from it.
class SampleSatSolver {
 public:
  SampleSatSolver(size_t num_vars, const SampleSatParams& params);

  void Reset(const std::vector<const SamplerClause*>& clauses);
  /// Throws SamplerStuck after max_restarts failed attempts.
  /// `start`, when given, seeds the first attempt instead of a random state.
  const std::vector<uint8_t>& Sample(Rng& rng, const std::vector<uint8_t>* start = nullptr);

 private:
  bool Attempt(Rng& rng, const std::vector<uint8_t>* start);
  void Flip(uint32_t v);
  int BreakCount(uint32_t v) const;
  int MakeCount(uint32_t v) const;
  bool AcceptUphill(int delta, Rng& rng) const;
  void MarkUnsat(uint32_t c);
  void MarkSat(uint32_t c);

  size_t num_vars_;
  SampleSatParams params_;
  std::vector<const SamplerClause*> clauses_;
  // Occurrences of each variable in CSR form: (clause, negated).
  std::vector<uint32_t> occ_start_;
  std::vector<uint32_t> occ_clause_;
  std::vector<uint8_t> occ_negated_;
  std::vector<uint8_t> state_;
  std::vector<uint8_t> saved_;
  std::vector<uint32_t> num_true_;
  std::vector<uint32_t> unsat_;
  std::vector<int64_t> unsat_pos_;
  std::vector<double> uphill_accept_;
  bool has_empty_clause_ = false;
};

}  // namespace mlnqa

#endif  // MLNQA_SRC_SAMPLE_SAT_H_
