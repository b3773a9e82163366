#include "mlnqa/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "mlnqa/error.h"
#include "mlnqa/grounder.h"

namespace mlnqa {
namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Clock::time_point After(Clock::time_point start, double seconds) {
  return start + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(seconds));
}

uint64_t OptionSeed(uint64_t question_seed, size_t option) {
  return question_seed * 1000003ULL + option;
}

// Probability of an atom that may have vanished from the ground network.
double ValueOutsideNetwork(const MlnProgram& program, const GroundAtom& atom) {
  if (auto v = program.evidence().HardValue(atom)) return *v ? 1.0 : 0.0;
  if (auto it = program.evidence().soft().find(atom); it != program.evidence().soft().end())
    return it->second;
  const PredicateDecl* decl = program.FindPredicate(atom.predicate);
  return decl && decl->closed_world ? 0.0 : 0.5;
}

std::vector<double> Probabilities(const QuestionResult& r) {
  std::vector<double> out;
  for (const OptionResult& o : r.options) out.push_back(o.probability);
  return out;
}

void Finish(QuestionResult& r, double epsilon) {
  bool any = std::any_of(r.options.begin(), r.options.end(),
                         [](const OptionResult& o) { return !o.timed_out; });
  if (!any) throw Error(ErrorCode::kAllOptionsTimedOut, "question " + r.id);
  r.chosen = ChosenOptions(Probabilities(r), epsilon);
}

std::vector<KbRuleGraph> Pick(const std::vector<KbRuleGraph>& kb,
                              const std::vector<size_t>& indices) {
  std::vector<KbRuleGraph> out;
  for (size_t i : indices) out.push_back(kb[i]);
  return out;
}

}  // namespace

MultipleChoiceQuestion QuestionFromDocument(const QgDocument& doc, std::string id) {
  if (!doc.question)
    throw Error(ErrorCode::kInvalidProgram, "question " + id + " has no question block");
  if (doc.options.size() < 2)
    throw Error(ErrorCode::kInvalidProgram, "question " + id + " needs at least two options");
  return {std::move(id), *doc.question, doc.options, std::nullopt};
}

std::map<std::string, size_t> ParseAnswerKey(std::string_view text) {
  std::map<std::string, size_t> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
    std::istringstream fields(line);
    std::string id;
    long index = 0;
    if (!(fields >> id)) continue;
    if (!(fields >> index) || index < 1)
      throw Error(ErrorCode::kSyntax,
                  "key line " + std::to_string(line_no) + ": expected <id> <option index>");
    out[id] = static_cast<size_t>(index - 1);
  }
  return out;
}

std::vector<MultipleChoiceQuestion> LoadQuestionDirectory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".qg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, size_t> key;
  if (std::filesystem::exists(dir / "key.txt")) key = ParseAnswerKey(ReadTextFile(dir / "key.txt"));

  std::vector<MultipleChoiceQuestion> out;
  for (const auto& f : files) {
    MultipleChoiceQuestion q =
        QuestionFromDocument(ParseQgDocument(ReadTextFile(f), f.string()), f.stem().string());
    if (auto it = key.find(q.id); it != key.end()) {
      if (it->second >= q.options.size())
        throw Error(ErrorCode::kOutOfRange, "answer key for " + q.id + " names a missing option");
      q.correct = it->second;
    }
    out.push_back(std::move(q));
  }
  return out;
}

QuestionGraph OptionQuestion(const MultipleChoiceQuestion& q, size_t option) {
  QuestionGraph out = q.setup;
  const OptionGraph& o = q.options.at(option);
  out.nodes.insert(out.nodes.end(), o.nodes.begin(), o.nodes.end());
  out.edges.insert(out.edges.end(), o.edges.begin(), o.edges.end());
  return out;
}

std::set<std::string> GraphTokens(const LabeledGraph& g) {
  std::set<std::string> out;
  for (const GraphNode& n : g.nodes)
    for (std::string& t : LabelTokens(n.label)) out.insert(std::move(t));
  return out;
}

double RuleOverlap(const KbRuleGraph& rule, const std::set<std::string>& tokens) {
  std::set<std::string> own = GraphTokens(rule);
  if (own.empty()) return 0.0;
  size_t common = 0;
  for (const std::string& t : own) common += tokens.contains(t);
  return static_cast<double>(common) / static_cast<double>(own.size());
}

std::vector<size_t> RankRules(const std::set<std::string>& tokens,
                              const std::vector<KbRuleGraph>& kb, size_t k) {
  if (kb.empty()) throw Error(ErrorCode::kEmptyKb, "rule selection needs a nonempty KB");
  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < kb.size(); ++i) scored.push_back({RuleOverlap(kb[i], tokens), i});
  std::stable_sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return kb[a.second].id < kb[b.second].id;
  });
  std::vector<size_t> out;
  for (size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

std::vector<size_t> SelectRules(const MultipleChoiceQuestion& q,
                                const std::vector<KbRuleGraph>& kb, size_t k) {
  std::set<std::string> tokens = GraphTokens(q.setup);
  for (const OptionGraph& o : q.options) tokens.merge(GraphTokens(o));
  return RankRules(tokens, kb, k);
}

OptionResult EvaluateOption(const QuestionGraph& question, const std::vector<KbRuleGraph>& rules,
                            const EntailmentTable& table, const HarnessConfig& config,
                            uint64_t seed) {
  OptionResult out;
  for (const KbRuleGraph& r : rules) out.rules.push_back(r.id);
  auto start = Clock::now();
  auto total_deadline = After(start, config.total_timeout_s);
  try {
    Encoding enc = Encode(config.formulation, question, rules, table, config.encoder);
    GroundingOptions gopt;
    gopt.deadline = std::min(After(start, config.grounding_timeout_s), total_deadline);
    GroundNetwork net = GroundReduced(enc.program, nullptr, gopt);

    GroundAtom result_atom{"result", {}};
    std::vector<AtomId> queries;
    std::optional<AtomId> result_id = net.FindAtom(result_atom);
    if (result_id) queries.push_back(*result_id);
    if (config.formulation == Formulation::kPraline)
      for (AtomId a = 0; a < net.num_atoms(); ++a)
        if (net.atom(a).predicate == "holds" || net.atom(a).predicate == "aligns")
          queries.push_back(a);

    McSatConfig mc = config.mcsat;
    mc.rng_seed = seed;
    mc.deadline = total_deadline;
    if (config.mcsat.deadline) mc.deadline = std::min(*mc.deadline, *config.mcsat.deadline);
    MarginalResult m = McSat(net, queries, mc);

    out.probability =
        result_id ? m.at(*result_id) : ValueOutsideNetwork(enc.program, result_atom);
    for (AtomId a : queries)
      if (a != result_id) out.marginals[net.atom(a)] = m.at(a);
    out.stats = net.Stats();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTimeout) throw;
    out.timed_out = true;
    out.probability = -std::numeric_limits<double>::infinity();
  }
  out.ms = ElapsedMs(start);
  return out;
}

std::vector<size_t> ChosenOptions(const std::vector<double>& probabilities, double epsilon) {
  double best = -std::numeric_limits<double>::infinity();
  for (double p : probabilities) best = std::max(best, p);
  std::vector<size_t> out;
  if (std::isinf(best) && best < 0) return out;
  for (size_t i = 0; i < probabilities.size(); ++i)
    if (probabilities[i] >= best - epsilon) out.push_back(i);
  return out;
}

double Credit(const std::vector<double>& probabilities, size_t correct, double epsilon) {
  std::vector<size_t> chosen = ChosenOptions(probabilities, epsilon);
  if (std::find(chosen.begin(), chosen.end(), correct) == chosen.end()) return 0.0;
  return 1.0 / static_cast<double>(chosen.size());
}

QuestionResult AnswerQuestion(const MultipleChoiceQuestion& q, const std::vector<KbRuleGraph>& kb,
                              const EntailmentTable& table, const HarnessConfig& config,
                              uint64_t seed) {
  return ChainInference(q, kb, table, config, 1, seed);
}

QuestionResult ChainInference(const MultipleChoiceQuestion& q, const std::vector<KbRuleGraph>& kb,
                              const EntailmentTable& table, const HarnessConfig& config,
                              int depth, uint64_t seed) {
  if (depth < 1) throw Error(ErrorCode::kOutOfRange, "chain depth must be at least 1");
  if (depth > 1 && config.formulation != Formulation::kPraline)
    throw Error(ErrorCode::kOutOfRange, "chained inference needs the Praline formulation");
  auto start = Clock::now();
  QuestionResult result;
  result.id = q.id;
  result.correct = q.correct;

  for (size_t i = 0; i < q.options.size(); ++i) {
    QuestionGraph question = OptionQuestion(q, i);
    std::vector<size_t> used;
    if (config.rules_per_option > 0 && !kb.empty())
      used = RankRules(GraphTokens(question), kb,
                       std::min(config.rules_per_option, config.top_k));
    else if (config.formulation != Formulation::kPraline)
      throw Error(ErrorCode::kEmptyKb, "formulation needs at least one rule");
    OptionResult option = EvaluateOption(question, Pick(kb, used), table, config, OptionSeed(seed, i));

    for (int step = 2; step <= depth && !option.timed_out; ++step) {
      auto marginal = [&](const std::string& pred, std::vector<std::string> args) {
        auto it = option.marginals.find(GroundAtom{pred, std::move(args)});
        return it == option.marginals.end() ? 0.0 : it->second;
      };
      std::set<std::string> tokens;
      std::set<std::string> used_setup;
      for (size_t r : used) {
        for (const GraphNode& n : kb[r].nodes) {
          std::string name = PralineRuleNode(kb[r], n);
          if (n.role == NodeRole::kRhs && marginal("holds", {name}) >= config.promotion_threshold)
            for (std::string& t : LabelTokens(n.label)) tokens.insert(std::move(t));
          for (const GraphNode* s : question.NodesWithRole(NodeRole::kSetup))
            if (marginal("aligns", {s->id, name}) >= config.alignment_threshold)
              used_setup.insert(s->id);
        }
      }
      for (const GraphNode& n : question.nodes)
        if ((n.role == NodeRole::kSetup && !used_setup.contains(n.id)) ||
            n.role == NodeRole::kQuery)
          for (std::string& t : LabelTokens(n.label)) tokens.insert(std::move(t));

      std::vector<KbRuleGraph> remaining;
      std::vector<size_t> remaining_index;
      for (size_t r = 0; r < kb.size(); ++r)
        if (std::find(used.begin(), used.end(), r) == used.end()) {
          remaining.push_back(kb[r]);
          remaining_index.push_back(r);
        }
      if (remaining.empty()) break;
      used.push_back(remaining_index[RankRules(tokens, remaining, 1).front()]);
      option = EvaluateOption(question, Pick(kb, used), table, config, OptionSeed(seed, i));
    }
    option.name = q.options[i].name;
    result.options.push_back(std::move(option));
  }
  Finish(result, config.tie_epsilon);
  result.ms = ElapsedMs(start);
  return result;
}

ExamReport ScoreExam(std::vector<QuestionResult> results, double epsilon) {
  ExamReport report;
  double total = 0.0;
  for (QuestionResult& r : results) {
    if (!r.correct)
      throw Error(ErrorCode::kOutOfRange, "question " + r.id + " has no correct option");
    std::vector<double> p = Probabilities(r);
    r.chosen = ChosenOptions(p, epsilon);
    r.credit = r.options.empty() ? 0.0 : Credit(p, *r.correct, epsilon);
    total += r.credit;
  }
  report.score = results.empty() ? 0.0 : 100.0 * total / static_cast<double>(results.size());
  report.questions = std::move(results);
  return report;
}

ExamReport RunExam(const std::vector<MultipleChoiceQuestion>& questions,
                   const std::vector<KbRuleGraph>& kb, const EntailmentTable& table,
                   const HarnessConfig& config) {
  std::vector<QuestionResult> results(questions.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < questions.size(); i = next++) {
      const MultipleChoiceQuestion& q = questions[i];
      try {
        std::vector<KbRuleGraph> pool = Pick(kb, SelectRules(q, kb, config.top_k));
        results[i] = ChainInference(q, pool, table, config, config.chain_depth, config.seed + i);
      } catch (const Error& e) {
        results[i].id = q.id;
        results[i].correct = q.correct;
        results[i].options.clear();
        results[i].error = e.what();
      }
    }
  };
  int threads = std::max(1, config.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return ScoreExam(std::move(results), config.tie_epsilon);
}

std::string FormatReport(const ExamReport& report) {
  std::ostringstream out;
  for (const QuestionResult& r : report.questions) {
    out << "question " << r.id << " credit=" << FormatNumber(r.credit)
        << " ms=" << static_cast<long long>(r.ms) << "\n";
    if (!r.error.empty()) out << "  error " << r.error << "\n";
    for (size_t i = 0; i < r.options.size(); ++i) {
      const OptionResult& o = r.options[i];
      bool chosen = std::find(r.chosen.begin(), r.chosen.end(), i) != r.chosen.end();
      out << "  option " << o.name << " p="
          << (o.timed_out ? std::string("timeout") : FormatNumber(o.probability))
          << " atoms=" << o.stats.atoms << " clauses=" << o.stats.clauses()
          << " ms=" << static_cast<long long>(o.ms) << " rules=";
      for (size_t k = 0; k < o.rules.size(); ++k) out << (k ? "," : "") << o.rules[k];
      if (chosen) out << " chosen";
      if (r.correct == i) out << " correct";
      out << "\n";
    }
  }
  out << "score " << FormatNumber(report.score) << "\n";
  return out.str();
}

std::string FormatSummary(const ExamReport& report) {
  std::ostringstream out;
  out << "id\tprobabilities\tchosen\tcredit\tatoms\tclauses\n";
  for (const QuestionResult& r : report.questions) {
    size_t atoms = 0, clauses = 0;
    std::string probs, chosen;
    for (const OptionResult& o : r.options) {
      atoms += o.stats.atoms;
      clauses += o.stats.clauses();
      if (!probs.empty()) probs += ",";
      probs += o.timed_out ? std::string("timeout") : FormatNumber(o.probability);
    }
    for (size_t i : r.chosen) {
      if (!chosen.empty()) chosen += ",";
      chosen += r.options[i].name;
    }
    out << r.id << "\t" << (probs.empty() ? "-" : probs) << "\t"
        << (chosen.empty() ? "-" : chosen) << "\t" << FormatNumber(r.credit) << "\t" << atoms
        << "\t" << clauses << "\n";
  }
  out << "score\t" << FormatNumber(report.score) << "\n";
  return out.str();
}

}  // namespace mlnqa
