#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mlnqa/backbone.h"
#include "mlnqa/error.h"
#include "mlnqa/inference.h"
#include "test_util.h"

namespace mlnqa {
namespace {

std::map<std::vector<bool>, int> SampleHistogram(size_t vars,
                                                 const std::vector<SamplerClause>& clauses,
                                                 int n) {
  Rng rng(5);
  SampleSatParams params;
  params.flips = 200;
  std::map<std::vector<bool>, int> hist;
  for (int i = 0; i < n; ++i) hist[SampleSat(vars, clauses, params, rng)]++;
  return hist;
}

TEST(SampleSat, UniqueSolution) {
  auto hist = SampleHistogram(1, {{{0, false}}}, 200);
  ASSERT_EQ(hist.size(), 1u);
  EXPECT_EQ(hist.begin()->first, std::vector<bool>{true});
}

TEST(SampleSat, NearUniformOverDisjunction) {
  const int n = 10000;
  auto hist = SampleHistogram(2, {{{0, false}, {1, false}}}, n);
  ASSERT_EQ(hist.size(), 3u);
  for (const auto& [assignment, count] : hist)
    EXPECT_NEAR(static_cast<double>(count) / n, 1.0 / 3, 0.05);
}

TEST(SampleSat, UnconstrainedIsUniform) {
  const int n = 10000;
  auto hist = SampleHistogram(2, {}, n);
  ASSERT_EQ(hist.size(), 4u);
  for (const auto& [assignment, count] : hist)
    EXPECT_NEAR(static_cast<double>(count) / n, 0.25, 0.05);
}

TEST(SampleSat, StuckOnContradiction) {
  Rng rng(1);
  SampleSatParams params;
  params.flips = 50;
  try {
    SampleSat(1, {{{0, false}}, {{0, true}}}, params, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSamplerStuck);
  }
}

GroundNetwork SingleAtom(double w) {
  GroundNetwork net;
  AtomId a = net.InternAtom({"a", {}});
  net.AddSoft({{a, false}}, w);
  return net;
}

TEST(McSat, ZeroWeightIsUniform) {
  McSatConfig config;
  EXPECT_NEAR(McSat(SingleAtom(0.0), {0}, config).at(0), 0.5, 0.03);
}

TEST(McSat, LogThreeGivesThreeQuarters) {
  McSatConfig config;
  GroundNetwork net = SingleAtom(std::log(3.0));
  EXPECT_NEAR(EnumerateMarginals(net, {0}).at(0), 0.75, 1e-12);
  EXPECT_NEAR(McSat(net, {0}, config).at(0), 0.75, 0.03);
}

TEST(McSat, ChainAgreesWithEnumeration) {
  GroundNetwork net;
  std::vector<AtomId> ids;
  for (const char* n : {"a", "b", "c", "d"}) ids.push_back(net.InternAtom({n, {}}));
  net.AddHard({{ids[0], false}}, 0);
  for (int i = 0; i < 3; ++i) net.AddSoft({{ids[i], true}, {ids[i + 1], false}}, 1.0, i + 1);
  McSatConfig config;
  MarginalResult exact = EnumerateMarginals(net, ids);
  MarginalResult sampled = McSat(net, ids, config);
  for (AtomId a : ids) EXPECT_NEAR(sampled.at(a), exact.at(a), 0.05);
  EXPECT_EQ(sampled.samples_used, config.num_samples - config.burn_in);
}

TEST(McSat, FrozenQueriesReportFrozenValue) {
  GroundNetwork net;
  AtomId a = net.InternAtom({"a", {}});
  AtomId b = net.InternAtom({"b", {}});
  AtomId c = net.InternAtom({"c", {}});
  net.Freeze(a, true);
  net.Freeze(b, false);
  MarginalResult r = McSat(net, {a, b, c}, McSatConfig{});
  EXPECT_EQ(r.at(a), 1.0);
  EXPECT_EQ(r.at(b), 0.0);
  EXPECT_EQ(r.at(c), 0.5);
}

TEST(McSat, Deterministic) {
  std::mt19937_64 rng(9);
  GroundNetwork net = testing::RandomNetwork(rng);
  McSatConfig config;
  config.num_samples = 200;
  config.burn_in = 20;
  EXPECT_EQ(McSat(net, AllAtoms(net), config).marginals,
            McSat(net, AllAtoms(net), config).marginals);
}

TEST(McSat, RejectsBadConfig) {
  McSatConfig config;
  config.burn_in = config.num_samples;
  EXPECT_THROW(McSat(SingleAtom(1.0), {0}, config), Error);
  config = McSatConfig{};
  config.sa_probability = 1.5;
  EXPECT_THROW(McSat(SingleAtom(1.0), {0}, config), Error);
}

TEST(McSat, ConvergesOnRandomNetworks) {
  std::mt19937_64 rng(77);
  McSatConfig config;
  config.num_samples = 8000;
  config.burn_in = 100;
  config.flips_per_sample = 500;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    GroundNetwork net = ReduceGrounding(testing::RandomNetwork(rng));
    MarginalResult exact = EnumerateMarginals(net, AllAtoms(net));
    MarginalResult sampled = McSat(net, AllAtoms(net), config);
    for (const auto& [a, p] : exact.marginals)
      worst = std::max(worst, std::abs(sampled.at(a) - p));
  }
  EXPECT_LE(worst, 0.05);
}

TEST(McSat, FrequencyEstimator) {
  McSatConfig config;
  config.estimator = McSatConfig::Estimator::kFrequency;
  config.num_samples = 2000;
  EXPECT_NEAR(McSat(SingleAtom(std::log(3.0)), {0}, config).at(0), 0.75, 0.04);
}

// a <=> b <=> c through binary implications: the three only move together.
TEST(McSat, CrossesEquivalenceCycle) {
  GroundNetwork net;
  AtomId a = net.InternAtom({"a", {}});
  AtomId b = net.InternAtom({"b", {}});
  AtomId c = net.InternAtom({"c", {}});
  AtomId d = net.InternAtom({"d", {}});
  net.AddHard({{a, true}, {b, false}});
  net.AddHard({{b, true}, {c, false}});
  net.AddHard({{c, true}, {a, false}});
  net.AddHard({{c, false}, {d, false}});
  net.AddSoft({{a, false}}, 0.5);
  net.AddSoft({{d, true}}, 1.0);
  net.AddSoft({{b, true}, {d, false}}, 2.0);
  MarginalResult exact = EnumerateMarginals(net, AllAtoms(net));
  McSatConfig config;
  config.num_samples = 4000;
  config.flips_per_sample = 200;
  MarginalResult sampled = McSat(net, AllAtoms(net), config);
  for (AtomId x : {a, b, c, d}) EXPECT_NEAR(sampled.at(x), exact.at(x), 0.03);
  EXPECT_EQ(exact.at(a), exact.at(b));
}

TEST(Enumerate, Basics) {
  GroundNetwork net;
  AtomId a = net.InternAtom({"a", {}});
  EXPECT_EQ(EnumerateMarginals(net, {a}).at(a), 0.5);
  net.AddHard({{a, false}});
  EXPECT_EQ(EnumerateMarginals(net, {a}).at(a), 1.0);

  GroundNetwork soft;
  AtomId b = soft.InternAtom({"b", {}});
  soft.AddSoft({{b, false}}, std::log(9.0));
  EXPECT_NEAR(EnumerateMarginals(soft, {b}).at(b), 0.9, 1e-12);
}

TEST(Enumerate, Errors) {
  GroundNetwork big;
  for (int i = 0; i < 26; ++i) {
    AtomId a = big.InternAtom({"a" + std::to_string(i), {}});
    big.AddSoft({{a, false}}, 1.0);
  }
  try {
    EnumerateMarginals(big, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
  GroundNetwork bad;
  AtomId a = bad.InternAtom({"a", {}});
  AtomId b = bad.InternAtom({"b", {}});
  bad.AddHard({{a, false}, {b, false}});
  bad.AddHard({{a, true}, {b, false}});
  bad.AddHard({{a, false}, {b, true}});
  bad.AddHard({{a, true}, {b, true}});
  try {
    EnumerateMarginals(bad, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllHardViolated);
  }
}

TEST(Enumerate, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    GroundNetwork net = testing::RandomNetwork(rng);
    std::vector<double> expected = testing::BruteForceMarginals(net);
    MarginalResult r = EnumerateMarginals(net, AllAtoms(net));
    for (AtomId a = 0; a < net.num_atoms(); ++a) ASSERT_NEAR(r.at(a), expected[a], 1e-9);
  }
}

TEST(Enumerate, MonotoneInUnitWeight) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 30; ++i) {
    GroundNetwork base = testing::RandomNetwork(rng);
    double last = -1.0;
    for (double w : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      GroundNetwork net = base;
      net.AddSoft({{0, false}}, w, 99);
      double m = EnumerateMarginals(net, {0}).at(0);
      EXPECT_GE(m, last - 1e-12);
      last = m;
    }
  }
}

TEST(McSat, SamplesRespectHardClauses) {
  std::mt19937_64 rng(51);
  testing::RandomNetworkSpec spec;
  spec.hard_fraction = 0.8;
  for (int i = 0; i < 10; ++i) {
    GroundNetwork net = testing::RandomNetwork(rng, spec);
    MarginalResult exact = EnumerateMarginals(net, AllAtoms(net));
    McSatConfig config;
    config.num_samples = 100;
    config.burn_in = 10;
    MarginalResult r = McSat(net, AllAtoms(net), config);
    // Atoms forced by hard clauses must never be sampled otherwise.
    for (const auto& [a, p] : exact.marginals)
      if (p == 0.0 || p == 1.0) EXPECT_EQ(r.at(a), p);
  }
}

}  // namespace
}  // namespace mlnqa
