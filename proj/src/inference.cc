#include "mlnqa/inference.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include "mlnqa/error.h"
#include "sample_sat.h"

namespace mlnqa {
namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Literal nodes 2v (v true) and 2v+1 (v false). Returns the strongly
// connected components of the implication graph of the binary clauses.
std::vector<uint32_t> ImplicationComponents(size_t vars,
                                            const std::vector<SamplerClause>& binary) {
  const size_t n = 2 * vars;
  auto node = [](const GroundLiteral& l) { return 2 * l.atom + (l.negated ? 1 : 0); };
  std::vector<std::vector<uint32_t>> out(n), in(n);
  for (const SamplerClause& c : binary) {
    uint32_t a = node(c[0]), b = node(c[1]);
    out[a ^ 1].push_back(b);
    out[b ^ 1].push_back(a);
    in[b].push_back(a ^ 1);
    in[a].push_back(b ^ 1);
  }
  // Kosaraju, iteratively.
  std::vector<uint32_t> order;
  std::vector<uint8_t> seen(n, 0);
  for (uint32_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<uint32_t, size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < out[v].size()) {
        uint32_t w = out[v][i++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  const uint32_t kNone = std::numeric_limits<uint32_t>::max();
  std::vector<uint32_t> comp(n, kNone);
  uint32_t next = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != kNone) continue;
    std::vector<uint32_t> stack{*it};
    comp[*it] = next;
    while (!stack.empty()) {
      uint32_t v = stack.back();
      stack.pop_back();
      for (uint32_t w : in[v])
        if (comp[w] == kNone) {
          comp[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return comp;
}

// Free atoms that occur in some clause, densely renumbered. Atoms that the
// hard binary clauses force to be equal (or opposite) share one variable.
struct DenseView {
  struct Slot {
    uint32_t var;
    bool negated;
  };
  size_t num_vars = 0;
  std::map<AtomId, Slot> index;
  std::vector<SamplerClause> hard;
  std::vector<SamplerClause> soft;
  std::vector<double> soft_weights;
};

DenseView MakeDenseView(const GroundNetwork& net) {
  std::map<AtomId, uint32_t> first;
  std::vector<SamplerClause> hard, soft;
  std::vector<double> weights;
  auto convert = [&](const GroundClause& c) {
    SamplerClause out;
    for (const GroundLiteral& l : c.literals()) {
      auto [it, inserted] = first.emplace(l.atom, static_cast<uint32_t>(first.size()));
      out.push_back({it->second, l.negated});
    }
    return out;
  };
  for (const GroundClause& c : net.hard_clauses()) hard.push_back(convert(c));
  for (const GroundClause& c : net.soft_clauses()) {
    soft.push_back(convert(c));
    weights.push_back(c.weight().value());
  }

  const size_t n = first.size();
  std::vector<SamplerClause> binary;
  for (const SamplerClause& c : hard)
    if (c.size() == 2 && c[0].atom != c[1].atom) binary.push_back(c);
  std::vector<uint32_t> comp = ImplicationComponents(n, binary);
  bool consistent = true;
  for (uint32_t v = 0; v < n; ++v) consistent &= comp[2 * v] != comp[2 * v + 1];

  // Representative of each component: its literal with the smallest variable.
  std::vector<uint32_t> rep_node(2 * n, std::numeric_limits<uint32_t>::max());
  for (uint32_t node = 0; node < 2 * n; ++node)
    rep_node[comp[node]] = std::min(rep_node[comp[node]], node);
  std::vector<DenseView::Slot> slot(n);
  std::map<uint32_t, uint32_t> renumber;
  for (uint32_t v = 0; v < n; ++v) {
    uint32_t r = consistent ? rep_node[comp[2 * v]] : 2 * v;
    auto [it, inserted] = renumber.emplace(r / 2, static_cast<uint32_t>(renumber.size()));
    slot[v] = {it->second, (r & 1) != 0};
  }

  DenseView view;
  view.num_vars = renumber.size();
  for (const auto& [atom, v] : first) view.index[atom] = slot[v];
  // Rewrites onto representatives; nullopt for tautologies.
  auto rewrite = [&](const SamplerClause& c) -> std::optional<SamplerClause> {
    SamplerClause out;
    for (const GroundLiteral& l : c) {
      GroundLiteral m{slot[l.atom].var, l.negated != slot[l.atom].negated};
      bool dup = false;
      for (const GroundLiteral& o : out) {
        if (o.atom != m.atom) continue;
        if (o.negated != m.negated) return std::nullopt;
        dup = true;
      }
      if (!dup) out.push_back(m);
    }
    return out;
  };
  for (const SamplerClause& c : hard)
    if (auto r = rewrite(c)) view.hard.push_back(std::move(*r));
  // w on a and w' on !a are w - w' on a up to a constant; merging them
  // speeds up mixing without changing the distribution.
  std::map<uint32_t, double> unit_weight;
  for (size_t i = 0; i < soft.size(); ++i) {
    auto r = rewrite(soft[i]);
    if (!r) continue;
    if (r->size() == 1) {
      unit_weight[(*r)[0].atom] += (*r)[0].negated ? -weights[i] : weights[i];
      continue;
    }
    view.soft.push_back(std::move(*r));
    view.soft_weights.push_back(weights[i]);
  }
  for (const auto& [var, w] : unit_weight) {
    if (w == 0.0) continue;
    view.soft.push_back({{var, w < 0.0}});
    view.soft_weights.push_back(std::abs(w));
  }
  return view;
}

GroundNetwork Simplified(const GroundNetwork& network) {
  GroundNetwork net = network;
  net.Simplify();
  return net;
}

// Frozen atoms report their value, unconstrained free atoms 0.5.
void FillUnsampled(const GroundNetwork& net, const DenseView& view,
                   const std::vector<AtomId>& queries, MarginalResult& result) {
  for (AtomId q : queries) {
    if (q >= net.num_atoms())
      throw Error(ErrorCode::kOutOfRange, "query atom id out of range");
    FrozenState f = net.frozen(q);
    if (f != FrozenState::kFree)
      result.marginals[q] = f == FrozenState::kTrue ? 1.0 : 0.0;
    else if (!view.index.contains(q))
      result.marginals[q] = 0.5;
  }
}

// Pr(v = 1 | every other variable) under the full network, for each v.
class ConditionalScorer {
 public:
  explicit ConditionalScorer(const DenseView& view)
      : view_(view), occurrences_(view.num_vars) {
    for (uint32_t i = 0; i < view.hard.size(); ++i)
      for (const GroundLiteral& l : view.hard[i])
        occurrences_[l.atom].push_back({i, l.negated, true});
    for (uint32_t i = 0; i < view.soft.size(); ++i)
      for (const GroundLiteral& l : view.soft[i])
        occurrences_[l.atom].push_back({i, l.negated, false});
    hard_true_.resize(view.hard.size());
    soft_true_.resize(view.soft.size());
  }

  void Accumulate(const std::vector<uint8_t>& state, std::vector<double>& sums) {
    auto count_true = [&](const SamplerClause& c) {
      uint32_t n = 0;
      for (const GroundLiteral& l : c) n += state[l.atom] != l.negated;
      return n;
    };
    for (size_t i = 0; i < view_.hard.size(); ++i) hard_true_[i] = count_true(view_.hard[i]);
    for (size_t i = 0; i < view_.soft.size(); ++i) soft_true_[i] = count_true(view_.soft[i]);
    for (size_t v = 0; v < state.size(); ++v) {
      double delta = 0.0;
      bool forced_false = false, forced_true = false;
      for (const Occurrence& o : occurrences_[v]) {
        bool literal_true = state[v] != o.negated;
        uint32_t others =
            (o.hard ? hard_true_[o.clause] : soft_true_[o.clause]) - literal_true;
        if (others > 0) continue;
        // Only this literal can satisfy the clause.
        if (o.hard)
          (o.negated ? forced_false : forced_true) = true;
        else
          delta += o.negated ? -view_.soft_weights[o.clause] : view_.soft_weights[o.clause];
      }
      sums[v] += forced_false ? 0.0 : forced_true ? 1.0 : 1.0 / (1.0 + std::exp(-delta));
    }
  }

 private:
  struct Occurrence {
    uint32_t clause;
    bool negated;
    bool hard;
  };
  const DenseView& view_;
  std::vector<std::vector<Occurrence>> occurrences_;
  std::vector<uint32_t> hard_true_, soft_true_;
};

}  // namespace

void McSatConfig::Validate() const {
  if (num_samples <= 0 || flips_per_sample <= 0 || burn_in < 0 ||
      burn_in >= num_samples || max_restarts < 0)
    throw Error(ErrorCode::kOutOfRange, "MC-SAT counts must be positive");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(sa_probability) || !prob(walksat_noise))
    throw Error(ErrorCode::kOutOfRange, "MC-SAT probabilities must lie in [0,1]");
  if (sa_temperature < 0.0)
    throw Error(ErrorCode::kOutOfRange, "temperature must be non-negative");
}

std::vector<AtomId> AllAtoms(const GroundNetwork& network) {
  std::vector<AtomId> out(network.num_atoms());
  for (AtomId i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

MarginalResult McSat(const GroundNetwork& network, const std::vector<AtomId>& queries,
                     const McSatConfig& config) {
  config.Validate();
  auto start = Clock::now();
  GroundNetwork net = Simplified(network);
  DenseView view = MakeDenseView(net);

  MarginalResult result;
  result.stats = network.Stats();
  result.burn_in = config.burn_in;
  result.samples_used = config.num_samples - config.burn_in;
  FillUnsampled(net, view, queries, result);

  SampleSatParams params{config.flips_per_sample, config.sa_probability,
                         config.sa_temperature, config.walksat_noise,
                         config.max_restarts};
  SampleSatSolver solver(view.num_vars, params);
  Rng rng(config.rng_seed);

  std::vector<const SamplerClause*> active;
  for (const SamplerClause& c : view.hard) active.push_back(&c);
  solver.Reset(active);
  std::vector<uint8_t> state = solver.Sample(rng);

  std::vector<double> keep(view.soft.size());
  for (size_t i = 0; i < keep.size(); ++i) keep[i] = -std::expm1(-view.soft_weights[i]);

  const bool conditional = config.estimator == McSatConfig::Estimator::kConditional;
  std::vector<double> sums(view.num_vars, 0.0);
  ConditionalScorer scorer(view);

  Rng fill_rng(config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  auto observe = [&](const std::vector<uint8_t>& dense) {
    std::vector<bool> full(net.num_atoms());
    for (AtomId a = 0; a < net.num_atoms(); ++a) {
      if (net.is_frozen(a)) {
        full[a] = net.frozen(a) == FrozenState::kTrue;
      } else if (auto it = view.index.find(a); it != view.index.end()) {
        full[a] = dense[it->second.var] != it->second.negated;
      } else {
        full[a] = fill_rng() & 1;
      }
    }
    config.state_observer(full);
  };
  for (int iter = 0; iter < config.num_samples; ++iter) {
    if (config.deadline && Clock::now() > *config.deadline)
      throw Error(ErrorCode::kTimeout, "inference exceeded its time limit");
    active.resize(view.hard.size());
    for (size_t i = 0; i < view.soft.size(); ++i) {
      const SamplerClause& c = view.soft[i];
      bool sat = std::any_of(c.begin(), c.end(), [&](const GroundLiteral& l) {
        return state[l.atom] != l.negated;
      });
      if (sat && UniformReal(rng) < keep[i]) active.push_back(&c);
    }
    solver.Reset(active);
    std::vector<uint8_t> previous = state;
    state = solver.Sample(rng, &previous);
    if (iter < config.burn_in) continue;
    if (config.state_observer) observe(state);
    if (conditional)
      scorer.Accumulate(state, sums);
    else
      for (size_t v = 0; v < state.size(); ++v) sums[v] += state[v];
  }

  for (AtomId q : queries) {
    auto it = view.index.find(q);
    if (it == view.index.end()) continue;
    uint32_t v = it->second.var;
    double p = sums[v] / result.samples_used;
    result.marginals[q] = it->second.negated ? 1.0 - p : p;
  }
  result.wall_time_ms = ElapsedMs(start);
  return result;
}

MarginalResult EnumerateMarginals(const GroundNetwork& network,
                                  const std::vector<AtomId>& queries) {
  auto start = Clock::now();
  GroundNetwork net;
  try {
    net = Simplified(network);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kHardContradiction) throw;
    throw Error(ErrorCode::kAllHardViolated, e.what());
  }
  DenseView view = MakeDenseView(net);
  const size_t n = view.num_vars;
  if (n > kMaxEnumerationAtoms)
    throw Error(ErrorCode::kTooLarge,
                std::to_string(n) + " free atoms exceed the enumeration cap");

  struct Masks {
    uint32_t pos = 0;
    uint32_t neg = 0;
  };
  auto masks = [](const SamplerClause& c) {
    Masks m;
    for (const GroundLiteral& l : c) (l.negated ? m.neg : m.pos) |= 1u << l.atom;
    return m;
  };
  std::vector<Masks> hard, soft;
  for (const SamplerClause& c : view.hard) hard.push_back(masks(c));
  for (const SamplerClause& c : view.soft) soft.push_back(masks(c));

  // Running log-sum-exp: every accumulator is scaled by exp(-shift).
  double shift = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  std::vector<double> per_atom(n, 0.0);
  const uint64_t limit = uint64_t{1} << n;
  for (uint64_t a = 0; a < limit; ++a) {
    uint32_t x = static_cast<uint32_t>(a);
    bool ok = std::all_of(hard.begin(), hard.end(), [&](const Masks& m) {
      return ((x & m.pos) | (~x & m.neg)) != 0;
    });
    if (!ok) continue;
    double s = 0.0;
    for (size_t i = 0; i < soft.size(); ++i)
      if ((x & soft[i].pos) | (~x & soft[i].neg)) s += view.soft_weights[i];
    if (s > shift) {
      double scale = std::exp(shift - s);
      total *= scale;
      for (double& p : per_atom) p *= scale;
      shift = s;
    }
    double e = std::exp(s - shift);
    total += e;
    for (uint32_t bits = x; bits; bits &= bits - 1) per_atom[std::countr_zero(bits)] += e;
  }
  if (total == 0.0)
    throw Error(ErrorCode::kAllHardViolated, "no assignment satisfies the hard clauses");

  MarginalResult result;
  result.stats = network.Stats();
  FillUnsampled(net, view, queries, result);
  for (AtomId q : queries) {
    auto it = view.index.find(q);
    if (it == view.index.end()) continue;
    double p = per_atom[it->second.var] / total;
    result.marginals[q] = it->second.negated ? 1.0 - p : p;
  }
  result.wall_time_ms = ElapsedMs(start);
  return result;
}

}  // namespace mlnqa
