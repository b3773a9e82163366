#include "sample_sat.h"

#include <cmath>

#include "mlnqa/error.h"

namespace mlnqa {

namespace {
constexpr int kMaxTabulatedDelta = 64;

uint32_t RandomIndex(Rng& rng, size_t n) {
  return static_cast<uint32_t>(UniformReal(rng) * static_cast<double>(n));
}
}  // namespace

SampleSatSolver::SampleSatSolver(size_t num_vars, const SampleSatParams& params)
    : num_vars_(num_vars), params_(params), state_(num_vars) {
  uphill_accept_.resize(kMaxTabulatedDelta + 1);
  for (int d = 0; d <= kMaxTabulatedDelta; ++d)
    uphill_accept_[d] = params.sa_temperature > 0.0
                            ? std::exp(-d / params.sa_temperature)
                            : (d == 0 ? 1.0 : 0.0);
}

void SampleSatSolver::Reset(const std::vector<const SamplerClause*>& clauses) {
  clauses_ = clauses;
  has_empty_clause_ = false;
  for (const SamplerClause* c : clauses_)
    if (c->empty()) has_empty_clause_ = true;
  occ_start_.assign(num_vars_ + 1, 0);
  for (const SamplerClause* c : clauses_)
    for (const GroundLiteral& l : *c) ++occ_start_[l.atom + 1];
  for (size_t v = 0; v < num_vars_; ++v) occ_start_[v + 1] += occ_start_[v];
  occ_clause_.resize(occ_start_.back());
  occ_negated_.resize(occ_start_.back());
  std::vector<uint32_t> fill(occ_start_.begin(), occ_start_.end() - 1);
  for (uint32_t ci = 0; ci < clauses_.size(); ++ci) {
    for (const GroundLiteral& l : *clauses_[ci]) {
      uint32_t at = fill[l.atom]++;
      occ_clause_[at] = ci;
      occ_negated_[at] = l.negated;
    }
  }
  num_true_.assign(clauses_.size(), 0);
  unsat_pos_.assign(clauses_.size(), -1);
}

void SampleSatSolver::MarkUnsat(uint32_t c) {
  unsat_pos_[c] = static_cast<int64_t>(unsat_.size());
  unsat_.push_back(c);
}

void SampleSatSolver::MarkSat(uint32_t c) {
  int64_t pos = unsat_pos_[c];
  uint32_t last = unsat_.back();
  unsat_[pos] = last;
  unsat_pos_[last] = pos;
  unsat_.pop_back();
  unsat_pos_[c] = -1;
}

void SampleSatSolver::Flip(uint32_t v) {
  state_[v] ^= 1;
  for (uint32_t i = occ_start_[v]; i < occ_start_[v + 1]; ++i) {
    uint32_t c = occ_clause_[i];
    if (state_[v] != occ_negated_[i]) {
      if (num_true_[c]++ == 0) MarkSat(c);
    } else {
      if (--num_true_[c] == 0) MarkUnsat(c);
    }
  }
}

int SampleSatSolver::BreakCount(uint32_t v) const {
  int n = 0;
  for (uint32_t i = occ_start_[v]; i < occ_start_[v + 1]; ++i)
    if (state_[v] != occ_negated_[i] && num_true_[occ_clause_[i]] == 1) ++n;
  return n;
}

int SampleSatSolver::MakeCount(uint32_t v) const {
  int n = 0;
  for (uint32_t i = occ_start_[v]; i < occ_start_[v + 1]; ++i)
    if (state_[v] == occ_negated_[i] && num_true_[occ_clause_[i]] == 0) ++n;
  return n;
}

bool SampleSatSolver::AcceptUphill(int delta, Rng& rng) const {
  if (delta <= 0) return true;
  double p = delta <= kMaxTabulatedDelta ? uphill_accept_[delta] : 0.0;
  return UniformReal(rng) < p;
}

bool SampleSatSolver::Attempt(Rng& rng, const std::vector<uint8_t>* start) {
  if (has_empty_clause_) return false;
  if (start)
    state_ = *start;
  else
    for (size_t v = 0; v < num_vars_; ++v) state_[v] = rng() & 1;
  unsat_.clear();
  for (uint32_t c = 0; c < clauses_.size(); ++c) {
    uint32_t n = 0;
    for (const GroundLiteral& l : *clauses_[c])
      if (state_[l.atom] != l.negated) ++n;
    num_true_[c] = n;
    unsat_pos_[c] = -1;
    if (n == 0) MarkUnsat(c);
  }
  bool have_saved = false;
  if (num_vars_ == 0) return unsat_.empty();

  // An odd/even budget at random keeps unconstrained walks aperiodic.
  const int flips = params_.flips - static_cast<int>(rng() & 1);
  for (int step = 0; step < flips; ++step) {
    if (unsat_.empty()) {
      uint32_t v = RandomIndex(rng, num_vars_);
      if (num_vars_ > 1 && (rng() & 1)) {
        // Pair move: crosses barriers that single flips cannot.
        uint32_t u = RandomIndex(rng, num_vars_ - 1);
        if (u >= v) ++u;
        Flip(v);
        Flip(u);
        int delta = static_cast<int>(unsat_.size());
        if (!AcceptUphill(delta, rng)) {
          Flip(u);
          Flip(v);
        } else if (delta > 0) {
          Flip(u);
          Flip(v);
          saved_ = state_;
          have_saved = true;
          Flip(v);
          Flip(u);
        }
        continue;
      }
      int delta = BreakCount(v);
      if (!AcceptUphill(delta, rng)) continue;
      if (delta > 0) {
        saved_ = state_;
        have_saved = true;
      }
      Flip(v);
      continue;
    }
    if (UniformReal(rng) < params_.sa_probability) {
      uint32_t v = RandomIndex(rng, num_vars_);
      if (AcceptUphill(BreakCount(v) - MakeCount(v), rng)) Flip(v);
      continue;
    }
    const SamplerClause& c = *clauses_[unsat_[RandomIndex(rng, unsat_.size())]];
    uint32_t pick = c[0].atom;
    int best = -1;
    int ties = 0;
    for (const GroundLiteral& l : c) {
      int b = BreakCount(l.atom);
      if (best < 0 || b < best) {
        best = b;
        pick = l.atom;
        ties = 1;
      } else if (b == best && RandomIndex(rng, ++ties) == 0) {
        pick = l.atom;
      }
    }
    if (best > 0 && UniformReal(rng) < params_.walksat_noise)
      pick = c[RandomIndex(rng, c.size())].atom;
    Flip(pick);
  }
  if (unsat_.empty()) return true;
  if (!have_saved) return false;
  state_ = saved_;
  return true;
}

const std::vector<uint8_t>& SampleSatSolver::Sample(Rng& rng,
                                                    const std::vector<uint8_t>* start) {
  for (int attempt = 0; attempt <= params_.max_restarts; ++attempt)
    if (Attempt(rng, attempt == 0 ? start : nullptr)) return state_;
  throw Error(ErrorCode::kSamplerStuck,
              "no solution found after " + std::to_string(params_.max_restarts) +
                  " restarts");
}

std::vector<bool> SampleSat(size_t num_vars, const std::vector<SamplerClause>& clauses,
                            const SampleSatParams& params, Rng& rng) {
  SampleSatSolver solver(num_vars, params);
  std::vector<const SamplerClause*> ptrs;
  for (const SamplerClause& c : clauses) ptrs.push_back(&c);
  solver.Reset(ptrs);
  const std::vector<uint8_t>& s = solver.Sample(rng);
  return std::vector<bool>(s.begin(), s.end());
}

}  // namespace mlnqa
