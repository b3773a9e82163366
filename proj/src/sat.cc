#include "mlnqa/sat.h"

#include <algorithm>
#include <cassert>
#include <cstdlib>

namespace mlnqa {
namespace {

// Internal literal encoding: 2 * var + sign, var is 0-based.
using Lit = int;
constexpr Lit kNoLit = -1;
constexpr int kNoReason = -1;

inline Lit MakeLit(int var, bool negative) { return 2 * var + (negative ? 1 : 0); }
inline int VarOf(Lit l) { return l >> 1; }
inline bool SignOf(Lit l) { return l & 1; }
inline Lit Neg(Lit l) { return l ^ 1; }

enum : uint8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

double Luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1.0;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct SatInstance::Impl {
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0.0;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };

  std::vector<Clause> clauses;
  std::vector<int> learnts;
  std::vector<std::vector<Watcher>> watches;  // indexed by watched literal
  std::vector<uint8_t> assigns;
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<bool> polarity;  // saved phase: true = negative
  std::vector<double> activity;
  std::vector<Lit> trail;
  std::vector<int> trail_lim;
  size_t qhead = 0;
  bool ok = true;

  // VSIDS order heap.
  std::vector<int> heap;
  std::vector<int> heap_pos;  // -1 when not in heap
  double var_inc = 1.0;
  double cla_inc = 1.0;

  std::vector<bool> seen;
  std::vector<bool> model;
  uint64_t conflicts = 0;
  size_t num_original = 0;
  double max_learnts = 0;

  int num_vars() const { return static_cast<int>(assigns.size()); }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  uint8_t value(Lit l) const {
    uint8_t a = assigns[VarOf(l)];
    if (a == kUndef) return kUndef;
    return static_cast<uint8_t>(a ^ static_cast<uint8_t>(SignOf(l)));
  }

  void NewVar() {
    int v = num_vars();
    assigns.push_back(kUndef);
    level.push_back(0);
    reason.push_back(kNoReason);
    polarity.push_back(true);
    activity.push_back(0.0);
    seen.push_back(false);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    HeapInsert(v);
  }

  // --- heap -----------------------------------------------------------------
  bool HeapLess(int a, int b) const {
    if (activity[a] != activity[b]) return activity[a] > activity[b];
    return a < b;
  }
  void HeapUp(int i) {
    int v = heap[i];
    while (i > 0) {
      int parent = (i - 1) >> 1;
      if (!HeapLess(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = i;
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }
  void HeapDown(int i) {
    int v = heap[i];
    int n = static_cast<int>(heap.size());
    while (true) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && HeapLess(heap[child + 1], heap[child])) ++child;
      if (!HeapLess(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = i;
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }
  void HeapInsert(int v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_pos[v] = static_cast<int>(heap.size()) - 1;
    HeapUp(heap_pos[v]);
  }
  int HeapPop() {
    int top = heap[0];
    heap_pos[top] = -1;
    int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      HeapDown(0);
    }
    return top;
  }

  void BumpVar(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) HeapUp(heap_pos[v]);
  }
  void BumpClause(Clause& c) {
    c.activity += cla_inc;
    if (c.activity > 1e20) {
      for (int cr : learnts) clauses[cr].activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  // --- assignment -----------------------------------------------------------
  void Enqueue(Lit l, int from) {
    int v = VarOf(l);
    assigns[v] = SignOf(l) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  void CancelUntil(int target) {
    if (decision_level() <= target) return;
    for (int i = static_cast<int>(trail.size()) - 1; i >= trail_lim[target]; --i) {
      int v = VarOf(trail[i]);
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      polarity[v] = SignOf(trail[i]);
      HeapInsert(v);
    }
    trail.resize(trail_lim[target]);
    trail_lim.resize(target);
    qhead = trail.size();
  }

  void Attach(int cref) {
    const Clause& c = clauses[cref];
    watches[c.lits[0]].push_back({cref, c.lits[1]});
    watches[c.lits[1]].push_back({cref, c.lits[0]});
  }

  int Propagate() {
    int conflict = kNoReason;
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit false_lit = Neg(p);
      std::vector<Watcher>& ws = watches[false_lit];
      size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i++];
        Clause& c = clauses[w.cref];
        if (c.deleted) continue;
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        std::vector<Lit>& lits = c.lits;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        Lit first = lits[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches[lits[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          Enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  void Analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
    int path = 0;
    Lit p = kNoLit;
    learnt.assign(1, kNoLit);
    int index = static_cast<int>(trail.size()) - 1;
    do {
      Clause& c = clauses[conflict];
      if (c.learnt) BumpClause(c);
      for (size_t k = (p == kNoLit ? 0 : 1); k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int v = VarOf(q);
        if (seen[v] || level[v] == 0) continue;
        BumpVar(v);
        seen[v] = true;
        if (level[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
      while (!seen[VarOf(trail[index])]) --index;
      p = trail[index--];
      conflict = reason[VarOf(p)];
      seen[VarOf(p)] = false;
      --path;
    } while (path > 0);
    learnt[0] = Neg(p);

    backtrack_level = 0;
    if (learnt.size() > 1) {
      size_t max_i = 1;
      for (size_t k = 2; k < learnt.size(); ++k)
        if (level[VarOf(learnt[k])] > level[VarOf(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      backtrack_level = level[VarOf(learnt[1])];
    }
    for (size_t k = 1; k < learnt.size(); ++k) seen[VarOf(learnt[k])] = false;
  }

  bool Locked(int cref) const {
    const Clause& c = clauses[cref];
    int v = VarOf(c.lits[0]);
    return reason[v] == cref && value(c.lits[0]) == kTrue;
  }

  void ReduceLearnts() {
    std::vector<int> live;
    for (int cr : learnts)
      if (!clauses[cr].deleted) live.push_back(cr);
    std::sort(live.begin(), live.end(), [&](int a, int b) {
      if (clauses[a].activity != clauses[b].activity)
        return clauses[a].activity < clauses[b].activity;
      return a < b;
    });
    size_t half = live.size() / 2;
    std::vector<int> kept;
    for (size_t k = 0; k < live.size(); ++k) {
      Clause& c = clauses[live[k]];
      if (k < half && c.lits.size() > 2 && !Locked(live[k])) {
        c.deleted = true;
        c.lits.clear();
        c.lits.shrink_to_fit();
      } else {
        kept.push_back(live[k]);
      }
    }
    learnts = std::move(kept);
  }

  Lit PickBranch() {
    while (!heap.empty()) {
      int v = HeapPop();
      if (assigns[v] == kUndef) return MakeLit(v, polarity[v]);
    }
    return kNoLit;
  }

  enum class SearchResult { kSat, kUnsat, kRestart };

  SearchResult Search(int conflict_budget, const std::vector<Lit>& assumptions) {
    int local_conflicts = 0;
    std::vector<Lit> learnt;
    while (true) {
      int conflict = Propagate();
      if (conflict != kNoReason) {
        ++conflicts;
        ++local_conflicts;
        if (decision_level() == 0) {
          ok = false;
          return SearchResult::kUnsat;
        }
        int bt = 0;
        Analyze(conflict, learnt, bt);
        CancelUntil(bt);
        if (learnt.size() == 1) {
          Enqueue(learnt[0], kNoReason);
        } else {
          int cref = static_cast<int>(clauses.size());
          clauses.push_back({learnt, true, false, 0.0});
          learnts.push_back(cref);
          BumpClause(clauses[cref]);
          Attach(cref);
          Enqueue(learnt[0], cref);
        }
        var_inc *= 1.0 / 0.95;
        cla_inc *= 1.0 / 0.999;
        continue;
      }
      if (local_conflicts >= conflict_budget) {
        CancelUntil(0);
        return SearchResult::kRestart;
      }
      if (static_cast<double>(learnts.size()) -
              static_cast<double>(trail.size()) >= max_learnts) {
        ReduceLearnts();
      }
      Lit next = kNoLit;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        Lit a = assumptions[decision_level()];
        uint8_t val = value(a);
        if (val == kTrue) {
          trail_lim.push_back(static_cast<int>(trail.size()));
        } else if (val == kFalse) {
          return SearchResult::kUnsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == kNoLit) {
        next = PickBranch();
        if (next == kNoLit) return SearchResult::kSat;
      }
      trail_lim.push_back(static_cast<int>(trail.size()));
      Enqueue(next, kNoReason);
    }
  }
};

SatInstance::SatInstance() : impl_(std::make_unique<Impl>()) {}
SatInstance::~SatInstance() = default;
SatInstance::SatInstance(SatInstance&&) noexcept = default;
SatInstance& SatInstance::operator=(SatInstance&&) noexcept = default;

void SatInstance::EnsureVariable(int var) {
  while (impl_->num_vars() < var) impl_->NewVar();
}

int SatInstance::num_variables() const { return impl_->num_vars(); }

bool SatInstance::AddClause(std::span<const int> literals) {
  Impl& s = *impl_;
  if (!s.ok) return false;
  std::vector<Lit> lits;
  lits.reserve(literals.size());
  for (int x : literals) {
    assert(x != 0);
    int var = std::abs(x);
    EnsureVariable(var);
    lits.push_back(MakeLit(var - 1, x < 0));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == Neg(lits[i])) return true;
    uint8_t val = s.value(lits[i]);
    if (val == kTrue) return true;  // satisfied at level 0
    if (val == kFalse) continue;
    kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    s.ok = false;
    return false;
  }
  if (kept.size() == 1) {
    s.Enqueue(kept[0], kNoReason);
    if (s.Propagate() != kNoReason) s.ok = false;
    return s.ok;
  }
  int cref = static_cast<int>(s.clauses.size());
  s.clauses.push_back({std::move(kept), false, false, 0.0});
  s.Attach(cref);
  ++s.num_original;
  return true;
}

SatStatus SatInstance::Solve(std::span<const int> assumptions) {
  Impl& s = *impl_;
  if (!s.ok) return SatStatus::kUnsat;
  std::vector<Lit> assumed;
  for (int x : assumptions) {
    EnsureVariable(std::abs(x));
    assumed.push_back(MakeLit(std::abs(x) - 1, x < 0));
  }
  s.max_learnts = std::max(100.0, static_cast<double>(s.num_original) / 3.0);
  Impl::SearchResult result = Impl::SearchResult::kRestart;
  for (int restart = 0; result == Impl::SearchResult::kRestart; ++restart) {
    int budget = static_cast<int>(Luby(2.0, restart) * 100.0);
    result = s.Search(budget, assumed);
    s.max_learnts *= 1.05;
  }
  if (result == Impl::SearchResult::kSat) {
    s.model.assign(static_cast<size_t>(s.num_vars()) + 1, false);
    for (int v = 0; v < s.num_vars(); ++v) s.model[v + 1] = s.assigns[v] == kTrue;
  }
  s.CancelUntil(0);
  return result == Impl::SearchResult::kSat ? SatStatus::kSat : SatStatus::kUnsat;
}

bool SatInstance::ModelValue(int var) const { return impl_->model.at(var); }
const std::vector<bool>& SatInstance::model() const { return impl_->model; }
uint64_t SatInstance::conflicts() const { return impl_->conflicts; }

}  // namespace mlnqa
