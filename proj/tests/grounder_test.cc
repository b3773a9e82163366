#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mlnqa/backbone.h"
#include "mlnqa/error.h"
#include "mlnqa/grounder.h"
#include "mlnqa/inference.h"
#include "mlnqa/parser.h"
#include "test_util.h"

namespace mlnqa {
namespace {

// Marginals of every program atom from the ground network: sampled atoms by
// enumeration, absent ones by their evidence / closed-world default.
std::map<GroundAtom, double> GroundedMarginals(const MlnProgram& program,
                                               const GroundNetwork& net) {
  MarginalResult r = EnumerateMarginals(net, AllAtoms(net));
  std::map<GroundAtom, double> out;
  for (const GroundAtom& g : testing::AllGroundAtoms(program)) {
    if (auto id = net.FindAtom(g)) {
      out[g] = r.at(*id);
      continue;
    }
    if (auto hv = program.evidence().HardValue(g)) {
      out[g] = *hv;
      continue;
    }
    out[g] = program.FindPredicate(g.predicate)->closed_world ? 0.0 : 0.5;
  }
  return out;
}

void ExpectSameMarginals(const std::map<GroundAtom, double>& a,
                         const std::map<GroundAtom, double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [g, m] : a) EXPECT_NEAR(b.at(g), m, tol) << g.ToString();
}

TEST(Ground, HardUnitOverDomain) {
  MlnProgram p = ParseMln("sort entity = {A, B}\npred p(entity)\np(x).\n");
  GroundNetwork net = Ground(p);
  EXPECT_EQ(net.hard_clauses().size(), 2u);
  EXPECT_EQ(net.soft_clauses().size(), 0u);
}

TEST(Ground, ClosedWorldWithSoftEvidence) {
  MlnProgram p = ParseMln(
      "sort string_ = {\"fox\", \"some_animals\", \"warm\"}\n"
      "pred entails*(string_, string_)\npred ok()\n"
      "0.5 entails(s,t) => ok()\n");
  p.mutable_evidence().AddSoft({"entails", {"fox", "some_animals"}}, 0.8);
  GroundNetwork net = Ground(p);
  AtomId listed = *net.FindAtom({"entails", {"fox", "some_animals"}});
  EXPECT_FALSE(net.is_frozen(listed));
  EXPECT_TRUE(net.is_soft_evidence(listed));
  size_t frozen_false = 0;
  for (AtomId a = 0; a < net.num_atoms(); ++a)
    if (net.atom(a).predicate == "entails" && a != listed) {
      EXPECT_EQ(net.frozen(a), FrozenState::kFalse);
      ++frozen_false;
    }
  EXPECT_EQ(frozen_false, 8u);
  bool found_unit = false;
  for (const GroundClause& c : net.soft_clauses())
    if (c.size() == 1 && c.literals()[0].atom == listed) {
      EXPECT_NEAR(c.weight().value(), std::log(4.0), 1e-12);
      found_unit = true;
    }
  EXPECT_TRUE(found_unit);

  MlnProgram alone = ParseMln(
      "sort string_ = {\"fox\", \"some_animals\"}\npred entails*(string_, string_)\n");
  alone.mutable_evidence().AddSoft({"entails", {"fox", "some_animals"}}, 0.8);
  GroundNetwork small = Ground(alone);
  AtomId a = *small.FindAtom({"entails", {"fox", "some_animals"}});
  EXPECT_NEAR(EnumerateMarginals(small, {a}).at(a), 0.8, 1e-12);
}

TEST(Ground, EmptyDomain) {
  MlnProgram p = ParseMln("pred p(entity)\np(x).\n");
  try {
    Ground(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDomain);
  }
}

TEST(Ground, HardContradictionWithEvidence) {
  MlnProgram p = ParseMln("sort entity = {A}\npred p(entity)\np(x).\n");
  p.mutable_evidence().AddFalse({"p", {"A"}});
  try {
    Ground(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHardContradiction);
  }
}

TEST(Ground, NoFrozenAtomsOrDuplicatesInClauses) {
  std::mt19937_64 rng(3);
  MlnProgram p = ParseMln(
      "sort entity = {A, B, C}\npred p(entity)\npred q*(entity, entity)\n"
      "1.0 p(x) => q(x,y)\np(x) v p(y) v !q(x,y).\n2.0 p(x) ^ p(y) => q(y,x)\n");
  p.mutable_evidence().AddTrue({"q", {"A", "B"}});
  p.mutable_evidence().AddFalse({"p", {"C"}});
  GroundNetwork net = Ground(p);
  for (const auto* clauses : {&net.hard_clauses(), &net.soft_clauses()}) {
    std::set<std::vector<GroundLiteral>> seen;
    for (const GroundClause& c : *clauses) {
      for (const GroundLiteral& l : c.literals()) EXPECT_FALSE(net.is_frozen(l.atom));
      EXPECT_TRUE(seen.insert(c.literals()).second);
    }
  }
}

// Random program with <= 3 constants and 3 predicates of arity <= 2.
MlnProgram RandomProgram(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MlnProgram p;
  p.DeclareSort("entity");
  int nconst = 2 + static_cast<int>(unit(rng) * 2);
  for (int i = 0; i < nconst; ++i) p.AddConstant("entity", std::string(1, 'A' + i));
  p.DeclarePredicate({"p", {"entity"}, false});
  p.DeclarePredicate({"q", {"entity", "entity"}, unit(rng) < 0.3});
  p.DeclarePredicate({"r", {}, false});
  Term x = Term::Variable("x", "entity"), y = Term::Variable("y", "entity");
  auto term = [&] {
    double u = unit(rng);
    if (u < 0.45) return x;
    if (u < 0.85) return y;
    return Term::Constant("A", "entity");
  };
  auto literal = [&] {
    double u = unit(rng);
    bool neg = unit(rng) < 0.4;
    if (u < 0.4) return Formula::Lit(Atom{"p", {term()}}, neg);
    if (u < 0.8) return Formula::Lit(Atom{"q", {term(), term()}}, neg);
    return Formula::Lit(Atom{"r", {}}, neg);
  };
  std::function<Formula(int)> formula = [&](int depth) -> Formula {
    double u = unit(rng);
    if (depth == 0 || u < 0.3) return literal();
    if (u < 0.5) return Formula::And({formula(depth - 1), formula(depth - 1)});
    if (u < 0.7) return Formula::Or({formula(depth - 1), formula(depth - 1)});
    if (u < 0.85) return Formula::Implies(formula(depth - 1), formula(depth - 1));
    return Formula::Equiv(literal(), literal());
  };
  int nformulas = 1 + static_cast<int>(unit(rng) * 3);
  for (int i = 0; i < nformulas; ++i) {
    Formula f = formula(2);
    if (unit(rng) < 0.25) {
      p.AddFormula(f, Weight::Hard());
      continue;
    }
    double w = unit(rng) * 3.0;
    // Negative weights only where a single clause results.
    if (ToCnf(f).size() <= 1 && unit(rng) < 0.3) w = -w;
    p.AddFormula(f, Weight::Soft(w));
  }
  std::vector<GroundAtom> atoms = testing::AllGroundAtoms(p);
  for (const GroundAtom& g : atoms) {
    double u = unit(rng);
    if (u < 0.08)
      p.mutable_evidence().AddTrue(g);
    else if (u < 0.14)
      p.mutable_evidence().AddFalse(g);
    else if (u < 0.2)
      p.mutable_evidence().AddSoft(g, 0.1 + 0.8 * unit(rng));
  }
  return p;
}

TEST(Ground, MatchesDirectSemanticsOnRandomPrograms) {
  std::mt19937_64 rng(101);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    MlnProgram p = RandomProgram(rng);
    auto direct = testing::DirectMarginals(p);
    if (!direct) {
      EXPECT_ANY_THROW(EnumerateMarginals(Ground(p), {})) << SerializeMln(p);
      continue;
    }
    GroundNetwork net = Ground(p);
    if (net.NumFreeAtoms() > kMaxEnumerationAtoms) continue;
    ExpectSameMarginals(*direct, GroundedMarginals(p, net), 1e-9);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(Ground, ReducedGroundingAgrees) {
  std::mt19937_64 rng(202);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    MlnProgram p = RandomProgram(rng);
    if (!testing::DirectMarginals(p)) continue;
    GroundNetwork naive = Ground(p);
    if (naive.NumFreeAtoms() > kMaxEnumerationAtoms) continue;
    ++compared;
    GroundNetwork reduced = GroundReduced(p);
    GroundNetwork after = ReduceGrounding(naive);
    ExpectSameMarginals(GroundedMarginals(p, naive), GroundedMarginals(p, reduced), 1e-9);
    ExpectSameMarginals(GroundedMarginals(p, naive), GroundedMarginals(p, after), 1e-9);
    EXPECT_LE(reduced.Stats().clauses(), naive.Stats().clauses());
  }
  EXPECT_GT(compared, 80);
}

TEST(RewriteExistentials, NoExistentialIsIdentity) {
  MlnProgram p = ParseMln("sort entity = {A}\npred p(entity)\n1.0 p(x)\n");
  EXPECT_EQ(RewriteExistentials(p), p);
}

TEST(RewriteExistentials, SingleVariable) {
  MlnProgram p = ParseMln(
      "sort entity = {A, B}\npred ante(entity)\npred p(entity, entity)\n"
      "1.2 ante(x) => EXIST y (p(x,y))\n");
  MlnProgram r = RewriteExistentials(p);
  ASSERT_NE(r.FindPredicate("E1"), nullptr);
  EXPECT_EQ(r.FindPredicate("E1")->arity(), 2u);
  EXPECT_TRUE(r.HasConstant("entity", "Y1"));
  ASSERT_EQ(r.formulas().size(), 2u);
  EXPECT_FALSE(r.formulas()[0].weight.is_hard());
  EXPECT_TRUE(r.formulas()[1].weight.is_hard());
  EXPECT_EQ(FormatFormula(r.formulas()[0].formula),
            "ante(x) => (E1(x,A) v E1(x,B) v E1(x,Y1))");

  // Same extended domain, original existential semantics.
  MlnProgram direct = p;
  direct.AddConstant("entity", "Y1");
  MlnProgram rewritten_ground = r;
  auto expected = testing::DirectMarginals(direct);
  auto got = GroundedMarginals(r, Ground(r));
  ASSERT_TRUE(expected);
  for (const auto& [g, m] : *expected) EXPECT_NEAR(got.at(g), m, 1e-9) << g.ToString();
}

TEST(RewriteExistentials, JointPredicateForTwoVariables) {
  MlnProgram p = ParseMln(
      "sort event = {G}\nsort entity = {A}\nsort string_ = {\"stays\", \"warm\"}\n"
      "pred isaE(event, string_)\npred isaA(entity, string_)\n"
      "pred objectEA(event, entity)\npred grows(event)\n"
      "0.9 grows(g) => EXIST s, r (isaE(s,\"stays\") ^ isaA(r,\"warm\") ^ objectEA(s,r))\n");
  MlnProgram r = RewriteExistentials(p);
  const PredicateDecl* e = r.FindPredicate("E1");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->arg_sorts, (std::vector<std::string>{"event", "event", "entity"}));
  EXPECT_TRUE(r.HasConstant("event", "S1"));
  EXPECT_TRUE(r.HasConstant("entity", "R1"));
  MlnProgram direct = p;
  direct.AddConstant("event", "S1");
  direct.AddConstant("entity", "R1");
  auto expected = testing::DirectMarginals(direct);
  auto got = GroundedMarginals(r, Ground(r));
  for (const auto& [g, m] : *expected) EXPECT_NEAR(got.at(g), m, 1e-9) << g.ToString();
}

TEST(RewriteExistentials, RejectsExistentialInAntecedent) {
  MlnProgram p = ParseMln(
      "sort entity = {A}\npred p(entity)\npred q(entity)\n"
      "(EXIST y (p(y))) => q(x).\n");
  try {
    RewriteExistentials(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedExistential);
  }
}

constexpr char kRefinedProgram[] = R"(
sort event = {G, K}
sort entity = {F, W}
sort string_ = {"grows", "warm", "fox"}
pred isaE(event, string_)
pred isaA(entity, string_)
pred objectEA(event, entity)
0.8 isaE(g,"grows") ^ isaA(r,"warm") => objectEA(g,r)
)";

TEST(RefinedTypeRules, AddsPruningRule) {
  MlnProgram p = ParseMln(kRefinedProgram);
  EntailmentTable t;
  t.Set("grows", "warm", 0.3);
  MlnProgram r = RefinedTypeRules(p, t);
  ASSERT_EQ(r.formulas().size(), 2u);
  EXPECT_EQ(FormatFormula(r.formulas()[1].formula), "objectEA(x,y) => !isaA(y,\"fox\")");
  EXPECT_TRUE(r.formulas()[1].weight.is_hard());
}

TEST(RefinedTypeRules, NoOpWhenEverythingRelated) {
  MlnProgram p = ParseMln(kRefinedProgram);
  EntailmentTable t;
  t.Set("fox", "warm", 0.1);
  t.Set("grows", "warm", 0.1);
  EXPECT_EQ(RefinedTypeRules(p, t), p);
}

TEST(RefinedTypeRules, KeepsMarginalsWhenPrunedAtomsUnentailed) {
  MlnProgram p = ParseMln(kRefinedProgram);
  p.AddFormula(ParseMln(std::string(kRefinedProgram) + "0.4 isaA(r,\"warm\")\n")
                   .formulas()
                   .back());
  p.mutable_evidence().AddFalse({"isaA", {"F", "fox"}});
  p.mutable_evidence().AddFalse({"isaA", {"W", "fox"}});
  p.mutable_evidence().AddFalse({"isaA", {"F", "grows"}});
  p.mutable_evidence().AddFalse({"isaA", {"W", "grows"}});
  MlnProgram r = RefinedTypeRules(p, EntailmentTable{});
  ASSERT_GT(r.formulas().size(), p.formulas().size());
  auto before = testing::DirectMarginals(p);
  auto after = GroundedMarginals(r, Ground(r));
  for (const auto& [g, m] : *before) EXPECT_NEAR(after.at(g), m, 1e-9) << g.ToString();
}

}  // namespace
}  // namespace mlnqa
