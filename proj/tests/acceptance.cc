// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any fails. Usage: acceptance <data-dir> <mlnqa-binary>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlnqa/backbone.h"
#include "mlnqa/encoders.h"
#include "mlnqa/grounder.h"
#include "mlnqa/harness.h"
#include "mlnqa/inference.h"
#include "mlnqa/sat.h"
#include "test_util.h"

namespace mlnqa {
namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string Fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<GroundNetwork> Corpus() {
  std::mt19937_64 rng(2024);
  std::vector<GroundNetwork> out;
  for (int i = 0; i < 50; ++i) out.push_back(testing::RandomNetwork(rng));
  return out;
}

Outcome OracleAgreement() {
  auto start = std::chrono::steady_clock::now();
  McSatConfig config;
  config.num_samples = 1000;
  config.rng_seed = 17;
  double worst = 0.0;
  for (const GroundNetwork& net : Corpus()) {
    MarginalResult exact = EnumerateMarginals(net, AllAtoms(net));
    MarginalResult sampled = McSat(ReduceGrounding(net), AllAtoms(net), config);
    for (const auto& [a, p] : exact.marginals)
      worst = std::max(worst, std::abs(sampled.at(a) - p));
  }
  double s = Seconds(start);
  return {worst <= 0.05 && s < 60.0,
          "max error " + Fixed(worst) + " over 50 networks in " + Fixed(s, 1) + " s"};
}

Outcome ReductionSoundness(const std::string& data) {
  double worst = 0.0;
  bool smaller = true;
  for (const GroundNetwork& net : Corpus()) {
    GroundNetwork reduced = ReduceGrounding(net);
    MarginalResult before = EnumerateMarginals(net, AllAtoms(net));
    MarginalResult after = EnumerateMarginals(reduced, AllAtoms(net));
    for (const auto& [a, p] : before.marginals) worst = std::max(worst, std::abs(after.at(a) - p));
    smaller &= reduced.Stats().clauses() <= net.Stats().clauses() &&
               reduced.Stats().free_atoms <= net.Stats().free_atoms;
  }
  std::string mln = data + "/fox/fo/keep_warm.mln", db = data + "/fox/fo/keep_warm.db";
  MlnProgram program = ParseMln(ReadTextFile(mln), mln);
  program.mutable_evidence() = ParseDb(ReadTextFile(db), program, db);
  size_t naive = Ground(program).Stats().clauses();
  size_t reduced = GroundReduced(program).Stats().clauses();
  return {worst <= 1e-9 && smaller && reduced < naive,
          "max difference " + FormatNumber(worst) + ", fox clauses " + std::to_string(naive) +
              " -> " + std::to_string(reduced)};
}

Outcome BackboneCorrectness() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> var(1, 8), len(1, 3), count(4, 30), sign(0, 1);
  int checked = 0, wrong = 0;
  while (checked < 100) {
    std::vector<std::vector<int>> cnf(count(rng));
    for (auto& clause : cnf) {
      int k = len(rng);
      for (int j = 0; j < k; ++j) clause.push_back(sign(rng) ? var(rng) : -var(rng));
    }
    std::vector<int> must(9, 0);  // 0 unseen, 1 always true, -1 always false, 2 both
    bool any = false;
    for (int m = 0; m < 256; ++m) {
      bool ok = std::all_of(cnf.begin(), cnf.end(), [&](const std::vector<int>& c) {
        return std::any_of(c.begin(), c.end(), [&](int l) {
          bool v = (m >> (std::abs(l) - 1)) & 1;
          return l > 0 ? v : !v;
        });
      });
      if (!ok) continue;
      any = true;
      for (int v = 1; v <= 8; ++v) {
        int val = (m >> (v - 1)) & 1 ? 1 : -1;
        must[v] = must[v] == 0 ? val : (must[v] == val ? val : 2);
      }
    }
    if (!any) continue;
    ++checked;
    std::set<int> truth;
    for (int v = 1; v <= 8; ++v)
      if (must[v] == 1 || must[v] == -1) truth.insert(must[v] * v);
    BackboneSet got = ComputeBackbone(cnf);
    std::set<int> mine;
    for (int v = 1; v <= 8; ++v)
      if (auto it = got.find(v); it != got.end()) mine.insert(it->second ? v : -v);
    if (mine != truth) ++wrong;
  }
  return {wrong == 0, std::to_string(checked) + " CNFs, " + std::to_string(wrong) + " mismatches"};
}

std::vector<std::string> FormulaLines(const Encoding& e, std::string_view skip = {}) {
  std::vector<std::string> out;
  for (size_t i = 0; i < e.program.formulas().size(); ++i)
    if (e.families[i] != skip)
      out.push_back(FormatFormula(e.program.formulas()[i].formula) + " @ " +
                    (e.program.formulas()[i].weight.is_hard()
                         ? std::string("hard")
                         : FormatNumber(e.program.formulas()[i].weight.value())));
  std::sort(out.begin(), out.end());
  return out;
}

struct Fox {
  MultipleChoiceQuestion question;
  std::vector<KbRuleGraph> kb, split;
  EntailmentTable table;
};

Fox LoadFox(const std::string& data) {
  return {LoadQuestionDirectory(data + "/fox/questions").at(0),
          ParseQg(ReadTextFile(data + "/fox/kb.qg")).second,
          ParseQg(ReadTextFile(data + "/fox/kb_split.qg")).second,
          ParseEnt(ReadTextFile(data + "/fox/fox.ent"))};
}

Outcome PralineSemantics(const Fox& fox) {
  // (a) no setup: nothing but the query nodes, so nothing can be proven.
  QuestionGraph no_setup = OptionQuestion(fox.question, 3);
  for (GraphNode& n : no_setup.nodes)
    if (n.role == NodeRole::kSetup) n.role = NodeRole::kQuery;
  std::vector<KbRuleGraph> rules = fox.split;
  rules.push_back(fox.kb[0]);
  Encoding empty = EncodePraline(no_setup, rules, fox.table);
  GroundNetwork en = GroundReduced(empty.program);
  McSatConfig config;
  config.num_samples = 1000;
  MarginalResult em = McSat(en, AllAtoms(en), config);
  double worst_holds = 0.0;
  for (const auto& [a, p] : em.marginals)
    if (en.atom(a).predicate == "holds") worst_holds = std::max(worst_holds, p);

  // (b) 100 sampled states without self-proofs or 2-cycles.
  Encoding full = EncodePraline(OptionQuestion(fox.question, 3), rules, fox.table);
  GroundNetwork net = GroundReduced(full.program);
  std::map<std::pair<std::string, std::string>, AtomId> proves;
  for (AtomId a = 0; a < net.num_atoms(); ++a)
    if (net.atom(a).predicate == "proves")
      proves[{net.atom(a).args[0], net.atom(a).args[1]}] = a;
  int states = 0, cyclic = 0;
  McSatConfig observe;
  observe.num_samples = 150;
  observe.burn_in = 50;
  observe.state_observer = [&](const std::vector<bool>& s) {
    ++states;
    for (const auto& [pair, id] : proves) {
      if (!s[id]) continue;
      auto back = proves.find({pair.second, pair.first});
      if (pair.first == pair.second || (back != proves.end() && s[back->second])) ++cyclic;
    }
  };
  McSat(net, {}, observe);

  // (c) each flag removes its family and nothing else.
  bool exact_removal = true;
  for (auto [flag, fam] : {std::pair{&PralineOptions::acyclic, family::kAcyclic},
                           std::pair{&PralineOptions::fup, family::kFup},
                           std::pair{&PralineOptions::setup_query_block, family::kSetupQuery}}) {
    EncoderOptions options;
    options.praline.*flag = false;
    Encoding ablated = EncodePraline(OptionQuestion(fox.question, 3), rules, fox.table, options);
    exact_removal &= full.Count(fam) > 0 && ablated.Count(fam) == 0 &&
                     FormulaLines(ablated) == FormulaLines(full, fam);
  }
  return {worst_holds <= 0.05 && states == 100 && cyclic == 0 && exact_removal,
          "max holds without setup " + Fixed(worst_holds) + "; " + std::to_string(states) +
              " states, " + std::to_string(cyclic) + " cycles; ablations " +
              (exact_removal ? "exact" : "leak")};
}

Outcome EndToEnd(const Fox& fox) {
  HarnessConfig config;
  auto start = std::chrono::steady_clock::now();
  QuestionResult one = AnswerQuestion(fox.question, fox.kb, fox.table, config, 1);
  double s = Seconds(start);
  bool top = true;
  for (size_t i = 0; i < 3; ++i) top &= one.options[3].probability > one.options[i].probability;
  start = std::chrono::steady_clock::now();
  QuestionResult d1 = ChainInference(fox.question, fox.split, fox.table, config, 1, 1);
  QuestionResult d2 = ChainInference(fox.question, fox.split, fox.table, config, 2, 1);
  double chain_s = Seconds(start);
  double p1 = d1.options[3].probability, p2 = d2.options[3].probability;
  return {top && p2 > p1 && s < 30.0 && chain_s < 30.0,
          "keep_warm " + Fixed(one.options[3].probability) + " vs best other " +
              Fixed(std::max({one.options[0].probability, one.options[1].probability,
                              one.options[2].probability})) +
              "; chain " + Fixed(p1) + " -> " + Fixed(p2) + "; " + Fixed(s, 1) + " s, " +
              Fixed(chain_s, 1) + " s"};
}

Outcome Scoring() {
  struct Case {
    std::vector<double> p;
    size_t correct;
    double credit;
  };
  std::vector<Case> cases = {{{0.7, 0.7, 0.2, 0.1}, 0, 0.5},
                             {{0.9, 0.1, 0.1, 0.1}, 0, 1.0},
                             {{0.25, 0.25, 0.25, 0.25}, 2, 0.25}};
  std::vector<QuestionResult> results;
  bool ok = true;
  for (const Case& c : cases) {
    ok &= Credit(c.p, c.correct, 1e-4) == c.credit;
    QuestionResult r;
    r.id = "q" + std::to_string(results.size());
    r.correct = c.correct;
    for (double p : c.p) r.options.push_back(OptionResult{.probability = p});
    results.push_back(r);
  }
  ExamReport report = ScoreExam(results);
  ok &= report.score == 100.0 * (0.5 + 1.0 + 0.25) / 3.0;
  return {ok, "credits 0.5, 1, 0.25; score " + Fixed(report.score)};
}

Outcome Determinism(const std::string& data, const std::string& cli) {
  auto dir = std::filesystem::temp_directory_path() / "mlnqa_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> summaries;
  for (int run = 0; run < 2; ++run) {
    std::string out = (dir / ("report" + std::to_string(run) + ".txt")).string();
    std::string cmd = cli + " exam --questions " + data + "/fox/questions --kb " + data +
                      "/fox/kb_split.qg --ent " + data + "/fox/fox.ent --formulation praline" +
                      " --chain 2 --seed 5 --threads " + std::to_string(run + 1) + " -o " + out +
                      " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "exam run failed: " + cmd};
    summaries.push_back(ReadTextFile(out + ".tsv"));
  }
  return {summaries[0] == summaries[1] && !summaries[0].empty(),
          std::to_string(summaries[0].size()) + " summary bytes, " +
              (summaries[0] == summaries[1] ? "identical" : "different")};
}

}  // namespace
}  // namespace mlnqa

int main(int argc, char** argv) {
  using namespace mlnqa;
  if (argc != 3) {
    std::cerr << "usage: acceptance <data-dir> <mlnqa-binary>\n";
    return 2;
  }
  std::string data = argv[1], cli = argv[2];
  Fox fox = LoadFox(data);
  std::vector<std::function<Outcome()>> criteria = {
      [] { return OracleAgreement(); },
      [&] { return ReductionSoundness(data); },
      [] { return BackboneCorrectness(); },
      [&] { return PralineSemantics(fox); },
      [&] { return EndToEnd(fox); },
      [] { return Scoring(); },
      [&] { return Determinism(data, cli); }};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
