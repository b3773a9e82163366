#ifndef MLNQA_INFERENCE_H_
#define MLNQA_INFERENCE_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "mlnqa/ground_network.h"

namespace mlnqa {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with the same bits on every platform.
inline double UniformReal(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct McSatConfig {
  /// kFrequency averages sampled states; kConditional averages each atom's
  /// probability given the rest of the sampled state.
  enum class Estimator { kFrequency, kConditional };

  int num_samples = 500;
  int flips_per_sample = 5000;
  int burn_in = 50;
  double sa_probability = 0.5;
  double sa_temperature = 0.1;
  double walksat_noise = 0.5;
  int max_restarts = 10;
  uint64_t rng_seed = 1;
  Estimator estimator = Estimator::kConditional;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Called with every kept state, indexed by the network's atom ids. Atoms
  /// outside every clause are filled in uniformly at random.
  std::function<void(const std::vector<bool>&)> state_observer;

  /// Throws OutOfRange on non-positive counts or probabilities outside [0,1].
  void Validate() const;
};

struct MarginalResult {
  std::map<AtomId, double> marginals;
  int samples_used = 0;
  int burn_in = 0;
  double wall_time_ms = 0.0;
  GroundStats stats;

  double at(AtomId atom) const { return marginals.at(atom); }
};

/// Clause over dense sampler variables [0, num_vars).
using SamplerClause = std::vector<GroundLiteral>;

struct SampleSatParams {
  int flips = 5000;
  double sa_probability = 0.5;
  double sa_temperature = 0.1;
  double walksat_noise = 0.5;
  int max_restarts = 10;
};

/// Near-uniform sample from the solutions of `clauses`: WalkSAT moves mixed
/// with simulated-annealing moves, starting from a random assignment.
/// Returns the last solution visited. Throws SamplerStuck when no solution is
/// found within the flip budget after every restart.
std::vector<bool> SampleSat(size_t num_vars, const std::vector<SamplerClause>& clauses,
                            const SampleSatParams& params, Rng& rng);

/// MC-SAT marginals for `queries`. Frozen atoms report their frozen value and
/// atoms that occur in no clause report 0.5.
MarginalResult McSat(const GroundNetwork& network, const std::vector<AtomId>& queries,
                     const McSatConfig& config);

/// Exact marginals by enumeration over the free atoms that occur in clauses.
/// Throws TooLarge above 25 such atoms and AllHardViolated when no assignment
/// satisfies the hard clauses.
MarginalResult EnumerateMarginals(const GroundNetwork& network,
                                  const std::vector<AtomId>& queries);

inline constexpr size_t kMaxEnumerationAtoms = 25;

/// Every atom id of the network, in order.
std::vector<AtomId> AllAtoms(const GroundNetwork& network);

}  // namespace mlnqa

#endif  // MLNQA_INFERENCE_H_
