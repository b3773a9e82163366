#include <gtest/gtest.h>

#include <cmath>

#include "mlnqa/error.h"
#include "mlnqa/parser.h"

namespace mlnqa {
namespace {

constexpr char kHeader[] = R"(
sort event = {G, K}
sort string_ = {"fox", "some_animals"}
pred agentEE(event, event)
pred entails*(string_, string_)
)";

TEST(ParseMln, HardAntiSymmetry) {
  MlnProgram p = ParseMln(std::string(kHeader) + "agentEE(x,y) => !agentEE(y,x).\n");
  ASSERT_EQ(p.formulas().size(), 1u);
  EXPECT_TRUE(p.formulas()[0].weight.is_hard());
  EXPECT_EQ(p.formulas()[0].formula.FreeVariables().size(), 2u);
}

TEST(ParseMln, SoftUnit) {
  MlnProgram p = ParseMln(std::string(kHeader) + "1.0986 entails(\"fox\",\"some_animals\")\n");
  ASSERT_EQ(p.formulas().size(), 1u);
  EXPECT_NEAR(p.formulas()[0].weight.value(), std::log(3.0), 1e-4);
  EXPECT_TRUE(p.formulas()[0].formula.IsSingleLiteral());
  EXPECT_TRUE(p.FindPredicate("entails")->closed_world);
}

TEST(ParseMln, UndeclaredConstant) {
  try {
    ParseMln("pred isaE(entity, string_)\nisaE(x,\"fox\").\n", "t.mln");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndeclaredConstant);
    EXPECT_EQ(e.span().line, 2);
    EXPECT_EQ(e.span().column_begin, 8);
  }
}

TEST(ParseMln, ErrorKinds) {
  auto code_of = [](const std::string& text) {
    try {
      ParseMln(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code_of("q(x)."), ErrorCode::kUndeclaredPredicate);
  EXPECT_EQ(code_of("pred p(entity)\np(x,y)."), ErrorCode::kArityMismatch);
  EXPECT_EQ(code_of("pred p(entity)\npred q(event)\np(x) => q(x)."),
            ErrorCode::kSortMismatch);
  EXPECT_EQ(code_of("pred p(entity)\np(x) =>"), ErrorCode::kSyntax);
  EXPECT_EQ(code_of("pred p(entity)\n1.0 p(x)."), ErrorCode::kSyntax);
}

TEST(ParseMln, OperatorPrecedence) {
  MlnProgram p = ParseMln(
      "pred a()\npred b()\npred c()\npred d()\n"
      "a() ^ b() v c() => d().\n");
  const Formula& f = p.formulas()[0].formula;
  ASSERT_EQ(f.kind(), Formula::Kind::kImplies);
  EXPECT_EQ(f.children()[0].kind(), Formula::Kind::kOr);
  EXPECT_EQ(f.children()[0].children()[0].kind(), Formula::Kind::kAnd);
}

TEST(ParseMln, ExistentialConsequent) {
  MlnProgram p = ParseMln(
      "sort entity = {A}\npred p(entity)\npred q(entity, entity)\n"
      "1.5 p(x) => EXIST y (q(x,y) ^ p(y))\n");
  const Formula& f = p.formulas()[0].formula;
  EXPECT_TRUE(f.ContainsExists());
  EXPECT_EQ(f.FreeVariables().size(), 1u);
}

TEST(ParseMln, RoundTrip) {
  std::string text = std::string(kHeader) +
                     "pred result()\n"
                     "agentEE(x,y) => !agentEE(y,x).\n"
                     "-0.5 entails(s,t) v !(agentEE(x,y) ^ agentEE(y,x))\n"
                     "result() <=> agentEE(G,K).\n"
                     "0.1 EXIST x (agentEE(x,K))\n";
  MlnProgram p = ParseMln(text);
  std::string once = SerializeMln(p);
  MlnProgram q = ParseMln(once);
  EXPECT_EQ(p, q);
  EXPECT_EQ(SerializeMln(q), once);
}

TEST(ParseDb, Examples) {
  MlnProgram ctx = ParseMln(
      "sort entity = {F}\nsort string_ = {\"fox\", \"some_animals\"}\n"
      "pred isaE(entity, string_)\npred entails*(string_, string_)\npred result()\n");
  Evidence ev = ParseDb(
      "isaE(F,\"fox\")\n!result()\nentails(\"fox\",\"some_animals\") p=0.8\n", ctx);
  EXPECT_TRUE(ev.hard_true().contains(GroundAtom{"isaE", {"F", "fox"}}));
  EXPECT_TRUE(ev.hard_false().contains(GroundAtom{"result", {}}));
  EXPECT_DOUBLE_EQ(ev.soft().at(GroundAtom{"entails", {"fox", "some_animals"}}), 0.8);

  Evidence again = ParseDb(SerializeDb(ev), ctx);
  EXPECT_EQ(ev, again);
}

TEST(ParseDb, ProbabilityOutOfRange) {
  MlnProgram ctx = ParseMln("pred result()\n");
  try {
    ParseDb("result() p=1.0\n", ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProbabilityOutOfRange);
  }
}

constexpr char kFoxQuestion[] = R"(
graph question
node F entity "fox" role=setup
node G event "grows" role=setup
node T entity "thick_fur" role=setup
node K event "keep_warm" role=query
edge agent G F
edge object G T
edge enables G K
edge agent K F
)";

TEST(ParseQg, FoxQuestion) {
  auto [q, rules] = ParseQg(kFoxQuestion);
  EXPECT_EQ(q.nodes.size(), 4u);
  EXPECT_EQ(q.edges.size(), 4u);
  EXPECT_TRUE(rules.empty());
  EXPECT_EQ(q.FindNode("K")->role, NodeRole::kQuery);
}

TEST(ParseQg, RuleGraph) {
  auto [q, rules] = ParseQg(R"(
graph rule R1
node G event "grow" role=lhs
node A entity "some_animals" role=lhs
node F entity "thicker_fur" role=lhs
node W event "the_winter" role=lhs
node S event "stays" role=rhs
node R entity "warm" role=rhs
edge agent G A
edge object G F
edge in G W
edge enables G S
edge agent S A
edge object S R
)");
  EXPECT_TRUE(q.nodes.empty());
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].nodes.size(), 6u);
  EXPECT_EQ(rules[0].edges.size(), 6u);
  EXPECT_DOUBLE_EQ(rules[0].confidence, 0.9);
}

TEST(ParseQg, EmptyQuestion) {
  auto [q, rules] = ParseQg("graph question\n");
  EXPECT_TRUE(q.nodes.empty());
  EXPECT_TRUE(q.edges.empty());
}

TEST(ParseQg, Errors) {
  auto code_of = [](const std::string& text) {
    try {
      ParseQgDocument(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code_of("graph question\nnode A entity \"a\" role=setup\n"
                    "node A entity \"b\" role=setup\n"),
            ErrorCode::kDuplicateNode);
  EXPECT_EQ(code_of("graph question\nedge agent A B\n"), ErrorCode::kMissingNode);
  EXPECT_EQ(code_of("graph question\nnode A entity \"a\" role=lhs\n"),
            ErrorCode::kIllegalRole);
  EXPECT_EQ(code_of("graph rule R\nnode A entity \"a\" role=setup\n"),
            ErrorCode::kIllegalRole);
}

TEST(ParseQg, RoundTrip) {
  std::string text = std::string(kFoxQuestion) +
                     "graph option d\nnode K2 event \"keep_warm\" role=query\n"
                     "edge enables G K2\n"
                     "graph rule R1 conf=0.7\nnode X entity \"x\" role=lhs\n"
                     "node Y entity \"y\" role=rhs\nedge near X Y\n";
  QgDocument doc = ParseQgDocument(text);
  EXPECT_EQ(ParseQgDocument(SerializeQg(doc)), doc);
}

TEST(ParseEnt, Examples) {
  EntailmentTable t = ParseEnt(
      "entails \"fox\" \"some_animals\" 0.8\nentails \"warm\" \"warm\" 1.0\n");
  EXPECT_DOUBLE_EQ(t.Score("fox", "some_animals"), 0.8);
  EXPECT_DOUBLE_EQ(t.Score("some_animals", "fox"), 0.0);
  EXPECT_DOUBLE_EQ(t.Score("warm", "warm"), 1.0);
  EXPECT_EQ(ParseEnt(SerializeEnt(t)), t);
}

TEST(ParseEnt, ScoreOutOfRange) {
  try {
    ParseEnt("entails \"a\" \"b\" 1.5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoreOutOfRange);
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  for (double v : {0.1, 1.0986122886681098, -2.5, 1e-7, 3.0}) {
    EXPECT_EQ(std::stod(FormatNumber(v)), v);
  }
}

}  // namespace
}  // namespace mlnqa
