// mlnqa: ground, infer, encode and exam subcommands.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlnqa/backbone.h"
#include "mlnqa/encoders.h"
#include "mlnqa/error.h"
#include "mlnqa/grounder.h"
#include "mlnqa/harness.h"
#include "mlnqa/inference.h"
#include "mlnqa/parser.h"

namespace {

using namespace mlnqa;

MlnProgram LoadProgram(const std::string& mln, const std::string& db) {
  MlnProgram program = ParseMln(ReadTextFile(mln), mln);
  if (!db.empty()) {
    Evidence evidence = ParseDb(ReadTextFile(db), program, db);
    for (const GroundAtom& a : evidence.hard_true()) program.mutable_evidence().AddTrue(a);
    for (const GroundAtom& a : evidence.hard_false()) program.mutable_evidence().AddFalse(a);
    for (const auto& [a, p] : evidence.soft()) program.mutable_evidence().AddSoft(a, p);
  }
  program.Validate();
  return program;
}

void PrintStats(std::ostream& out, const char* label, const GroundStats& s) {
  out << label << " atoms " << s.atoms << " free " << s.free_atoms << " clauses " << s.clauses()
      << " (hard " << s.hard_clauses << ", soft " << s.soft_clauses << ")\n";
}

// Every grounding of `pred` over its argument sorts.
std::vector<GroundAtom> Groundings(const MlnProgram& program, const std::string& pred) {
  const PredicateDecl* decl = program.FindPredicate(pred);
  if (!decl) throw Error(ErrorCode::kUndeclaredPredicate, pred);
  std::vector<GroundAtom> out{GroundAtom{pred, {}}};
  for (const std::string& sort : decl->arg_sorts) {
    std::vector<GroundAtom> next;
    for (const GroundAtom& partial : out)
      for (const std::string& c : program.FindSort(sort)->constants) {
        GroundAtom a = partial;
        a.args.push_back(c);
        next.push_back(std::move(a));
      }
    out = std::move(next);
  }
  return out;
}

double OutsideValue(const MlnProgram& program, const GroundAtom& atom) {
  if (auto v = program.evidence().HardValue(atom)) return *v ? 1.0 : 0.0;
  if (program.evidence().HasSoft(atom)) return program.evidence().soft().at(atom);
  return program.FindPredicate(atom.predicate)->closed_world ? 0.0 : 0.5;
}

struct GroundArgs {
  std::string mln, db, dump;
  bool reduce = false, stats = false;
};

int RunGround(const GroundArgs& args) {
  MlnProgram program = LoadProgram(args.mln, args.db);
  GroundNetwork net;
  if (args.reduce) {
    ReductionReport report;
    net = GroundReduced(program, &report);
    if (args.stats) {
      PrintStats(std::cout, "before", Ground(program).Stats());
      PrintStats(std::cout, "after ", report.after);
      for (const ReductionStep& s : report.steps)
        std::cout << "step formula " << s.formula << " clauses " << s.clauses_added << " frozen "
                  << s.frozen << "\n";
      std::cout << "frozen total " << report.total_frozen() << "\n";
    }
  } else {
    net = Ground(program);
    if (args.stats) PrintStats(std::cout, "ground", net.Stats());
  }
  if (!args.dump.empty()) WriteTextFile(args.dump, net.Dump());
  return 0;
}

struct InferArgs {
  std::string mln, db;
  std::vector<std::string> queries;
  int samples = 1000, flips = 5000;
  uint64_t seed = 1;
  bool exact = false;
};

int RunInfer(const InferArgs& args) {
  MlnProgram program = LoadProgram(args.mln, args.db);
  GroundNetwork net = GroundReduced(program);
  std::vector<GroundAtom> atoms;
  for (const std::string& q : args.queries)
    for (GroundAtom& a : Groundings(program, q)) atoms.push_back(std::move(a));
  std::vector<AtomId> ids;
  for (const GroundAtom& a : atoms)
    if (auto id = net.FindAtom(a)) ids.push_back(*id);
  MarginalResult result;
  if (args.exact) {
    result = EnumerateMarginals(net, ids);
  } else {
    McSatConfig config;
    config.num_samples = args.samples;
    config.flips_per_sample = args.flips;
    config.rng_seed = args.seed;
    result = McSat(net, ids, config);
  }
  for (const GroundAtom& a : atoms) {
    auto id = net.FindAtom(a);
    double p = id ? result.at(*id) : OutsideValue(program, a);
    std::cout << a.ToString() << " " << FormatNumber(p) << "\n";
  }
  return 0;
}

struct EncodeArgs {
  std::string formulation, question, rules, ent, out, db, option;
  bool no_acyclic = false, no_fup = false, no_setup_query = false;
};

EncoderOptions MakeEncoderOptions(bool no_acyclic, bool no_fup, bool no_setup_query) {
  EncoderOptions o;
  o.praline.acyclic = !no_acyclic;
  o.praline.fup = !no_fup;
  o.praline.setup_query_block = !no_setup_query;
  return o;
}

EntailmentTable LoadTable(const std::string& path) {
  return path.empty() ? EntailmentTable{} : ParseEnt(ReadTextFile(path), path);
}

int RunEncode(const EncodeArgs& args) {
  QgDocument doc = ParseQgDocument(ReadTextFile(args.question), args.question);
  QuestionGraph question;
  if (doc.options.empty()) {
    if (!doc.question) throw Error(ErrorCode::kInvalidProgram, args.question + ": no question block");
    question = *doc.question;
  } else {
    MultipleChoiceQuestion mc =
        QuestionFromDocument(doc, std::filesystem::path(args.question).stem().string());
    size_t index = 0;
    if (!args.option.empty()) {
      index = mc.options.size();
      for (size_t i = 0; i < mc.options.size(); ++i)
        if (mc.options[i].name == args.option) index = i;
      if (index == mc.options.size())
        throw Error(ErrorCode::kOutOfRange, "no option named " + args.option);
    }
    question = OptionQuestion(mc, index);
  }
  std::vector<KbRuleGraph> rules;
  if (!args.rules.empty()) rules = ParseQg(ReadTextFile(args.rules), args.rules).second;
  Encoding enc = Encode(ParseFormulation(args.formulation), question, rules, LoadTable(args.ent),
                        MakeEncoderOptions(args.no_acyclic, args.no_fup, args.no_setup_query));
  std::string db = args.db;
  if (db.empty()) db = std::filesystem::path(args.out).replace_extension(".db").string();
  WriteTextFile(args.out, SerializeMln(enc.program));
  WriteTextFile(db, SerializeDb(enc.program.evidence()));
  std::cout << "formulas " << enc.program.formulas().size() << "\n";
  return 0;
}

struct ExamArgs {
  std::string questions, kb, ent, formulation = "praline", out, summary;
  int chain = 1, threads = 1, samples = 500;
  uint64_t seed = 1;
  double total = 600.0, ground = 360.0;
  bool no_acyclic = false, no_fup = false, no_setup_query = false;
};

int RunExam(const ExamArgs& args) {
  std::vector<MultipleChoiceQuestion> questions = LoadQuestionDirectory(args.questions);
  std::vector<KbRuleGraph> kb = ParseQg(ReadTextFile(args.kb), args.kb).second;
  HarnessConfig config;
  config.formulation = ParseFormulation(args.formulation);
  config.encoder = MakeEncoderOptions(args.no_acyclic, args.no_fup, args.no_setup_query);
  config.mcsat.num_samples = args.samples;
  config.chain_depth = args.chain;
  config.seed = args.seed;
  config.threads = args.threads;
  config.total_timeout_s = args.total;
  config.grounding_timeout_s = args.ground;
  ExamReport report = mlnqa::RunExam(questions, kb, LoadTable(args.ent), config);
  WriteTextFile(args.out, FormatReport(report));
  WriteTextFile(args.summary.empty() ? args.out + ".tsv" : args.summary, FormatSummary(report));
  std::cout << "score " << FormatNumber(report.score) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov logic grounding, inference and question answering"};
  app.require_subcommand(1);

  GroundArgs g;
  CLI::App* ground = app.add_subcommand("ground", "Ground a program, optionally with backbone reduction");
  ground->add_option("program", g.mln)->required();
  ground->add_option("--db", g.db);
  ground->add_flag("--reduce", g.reduce);
  ground->add_option("--dump-ground", g.dump);
  ground->add_flag("--stats", g.stats);

  InferArgs i;
  CLI::App* infer = app.add_subcommand("infer", "Marginals of query predicates");
  infer->add_option("program", i.mln)->required();
  infer->add_option("--db", i.db);
  infer->add_option("--query", i.queries)->required();
  infer->add_option("--samples", i.samples);
  infer->add_option("--flips", i.flips);
  infer->add_option("--seed", i.seed);
  infer->add_flag("--exact", i.exact);

  EncodeArgs e;
  CLI::App* encode = app.add_subcommand("encode", "Write the MLN for one question");
  encode->add_option("--formulation", e.formulation)->required();
  encode->add_option("--question", e.question)->required();
  encode->add_option("--rules", e.rules);
  encode->add_option("--ent", e.ent);
  encode->add_option("-o,--output", e.out)->required();
  encode->add_option("--db", e.db, "evidence file (default: output with .db)");
  encode->add_option("--option", e.option, "answer option for multiple-choice files");
  encode->add_flag("--no-acyclic", e.no_acyclic);
  encode->add_flag("--no-fup", e.no_fup);
  encode->add_flag("--no-setup-query-align", e.no_setup_query);

  ExamArgs x;
  CLI::App* exam = app.add_subcommand("exam", "Answer a directory of questions");
  exam->add_option("--questions", x.questions)->required();
  exam->add_option("--kb", x.kb)->required();
  exam->add_option("--ent", x.ent);
  exam->add_option("--formulation", x.formulation);
  exam->add_option("--chain", x.chain);
  exam->add_option("--seed", x.seed);
  exam->add_option("--samples", x.samples);
  exam->add_option("--threads", x.threads);
  exam->add_option("--timeout-total", x.total);
  exam->add_option("--timeout-ground", x.ground);
  exam->add_flag("--no-acyclic", x.no_acyclic);
  exam->add_flag("--no-fup", x.no_fup);
  exam->add_flag("--no-setup-query-align", x.no_setup_query);
  exam->add_option("-o,--output", x.out)->required();
  exam->add_option("--summary", x.summary, "summary file (default: output with .tsv)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (ground->parsed()) return RunGround(g);
    if (infer->parsed()) return RunInfer(i);
    if (encode->parsed()) return RunEncode(e);
    if (exam->parsed()) return RunExam(x);
  } catch (const std::exception& ex) {
    std::cerr << "mlnqa: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
