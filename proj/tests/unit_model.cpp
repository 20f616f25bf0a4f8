#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phishsim/model.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace phishsim;
using phishsim::testing::forced_distribution_agent;
using phishsim::testing::random_agent;
using phishsim::testing::random_bundle;

TEST_CASE("match quality: zero bundle returns the baseline") {
  SplitMix64 rng(1);
  const AgentProfile agent = random_agent(rng, 3, true);
  const CueBundle zero{VectorXd::Zero(3)};
  for (int idx = 0; idx < kCriterionCount; ++idx) {
    const auto c = criterion_from_index(idx);
    CHECK(match_quality(zero, agent, c, Regime::Prior) == doctest::Approx(agent.baseline[idx]));
  }
}

TEST_CASE("match quality: hand-evaluated linear form") {
  AgentProfile agent = forced_distribution_agent(Vector4d{0.1, 0.1, 0.1, 0.1}, 2, false);
  agent.susceptibility_prior.row(0) << 0.2, 0.4;
  agent.susceptibility_posterior = agent.susceptibility_prior;
  const CueBundle bundle{Eigen::Vector2d{0.5, 0.5}};
  CHECK(match_quality(bundle, agent, ChoiceCriterion::Deliberative, Regime::Prior) ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("match quality: zero susceptibility row ignores every bundle") {
  SplitMix64 rng(2);
  AgentProfile agent = random_agent(rng, 4, false);
  agent.susceptibility_prior.row(1).setZero();
  for (int i = 0; i < 20; ++i) {
    const CueBundle bundle = random_bundle(rng, 4);
    CHECK(match_quality(bundle, agent, ChoiceCriterion::Behavioral, Regime::Prior) ==
          doctest::Approx(agent.baseline[1]));
  }
}

TEST_CASE("match quality: dimension mismatch is a configuration error") {
  SplitMix64 rng(3);
  const AgentProfile agent = random_agent(rng, 3, false);
  const CueBundle bundle{Eigen::Vector2d{0.1, 0.1}};
  CHECK_THROWS_AS(match_quality(bundle, agent, ChoiceCriterion::Routine, Regime::Prior),
                  ValidationError);
}

TEST_CASE("som distribution: equal qualities give the uniform distribution") {
  const AgentProfile agent = forced_distribution_agent(Vector4d::Ones(), 2, false);
  const SoMDistribution dist = som_distribution(CueBundle{VectorXd::Zero(2)}, agent, Regime::Prior);
  for (int i = 0; i < kCriterionCount; ++i) CHECK(dist.p[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("som distribution: qualities that sum to one pass through") {
  const AgentProfile agent = forced_distribution_agent(Vector4d{0.4, 0.3, 0.2, 0.1}, 1, false);
  const SoMDistribution dist = som_distribution(CueBundle{VectorXd::Zero(1)}, agent, Regime::Prior);
  CHECK(dist.p[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(dist.p[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(dist.p[2] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(dist.p[3] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("som distribution: normalization holds over randomized inputs") {
  SplitMix64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const int cue_count = 1 + static_cast<int>(rng.next_u64() % 5);
    const AgentProfile agent = random_agent(rng, cue_count, rng.next_unit() < 0.5);
    const Regime regime = rng.next_unit() < 0.5 ? Regime::Prior : Regime::Posterior;
    const SoMDistribution dist = som_distribution(random_bundle(rng, cue_count), agent, regime);
    CHECK(std::abs(dist.p.sum() - 1.0) <= 1e-12);
    for (int c = 0; c < kCriterionCount; ++c) {
      CHECK(dist.p[c] >= 0.0);
      CHECK(dist.p[c] <= 1.0);
    }
  }
}

TEST_CASE("som distribution: invariant under joint scaling of baseline and susceptibility") {
  SplitMix64 rng(5);
  for (double lambda : {0.1, 7.0, 1000.0}) {
    for (int i = 0; i < 200; ++i) {
      const int cue_count = 1 + static_cast<int>(rng.next_u64() % 4);
      AgentProfile agent = random_agent(rng, cue_count, false);
      const CueBundle bundle = random_bundle(rng, cue_count);
      const SoMDistribution base = som_distribution(bundle, agent, Regime::Prior);
      agent.baseline *= lambda;
      agent.susceptibility_prior *= lambda;
      agent.susceptibility_posterior *= lambda;
      const SoMDistribution scaled = som_distribution(bundle, agent, Regime::Prior);
      for (int c = 0; c < kCriterionCount; ++c) {
        CHECK(std::abs(base.p[c] - scaled.p[c]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("som distribution: raising one susceptibility entry moves mass toward it") {
  SplitMix64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const int cue_count = 2;
    AgentProfile agent = random_agent(rng, cue_count, false);
    CueBundle bundle = random_bundle(rng, cue_count);
    bundle.emphasis[0] = std::max(bundle.emphasis[0], 0.25);  // the bumped cue must be emphasized
    const int c = static_cast<int>(rng.next_u64() % kCriterionCount);
    agent.susceptibility_prior(c, 0) = std::min(0.5, agent.susceptibility_prior(c, 0));
    const SoMDistribution before = som_distribution(bundle, agent, Regime::Prior);
    agent.susceptibility_prior(c, 0) += 0.3;
    const SoMDistribution after = som_distribution(bundle, agent, Regime::Prior);
    CHECK(after.p[c] > before.p[c]);
    for (int other = 0; other < kCriterionCount; ++other) {
      if (other != c) CHECK(after.p[other] <= before.p[other] + 1e-15);
    }
  }
}

TEST_CASE("som distribution: insider knowledge never lowers the routine share") {
  SplitMix64 rng(7);
  const int routine = criterion_index(ChoiceCriterion::Routine);
  for (int i = 0; i < 200; ++i) {
    const int cue_count = 1 + static_cast<int>(rng.next_u64() % 4);
    const AgentProfile agent = random_agent(rng, cue_count, true);
    const CueBundle bundle = random_bundle(rng, cue_count);
    const double prior = som_distribution(bundle, agent, Regime::Prior).p[routine];
    const double posterior = som_distribution(bundle, agent, Regime::Posterior).p[routine];
    CHECK(posterior >= prior - 1e-12);
  }
}

TEST_CASE("sample criterion: degenerate distributions are deterministic") {
  SplitMix64 rng(8);
  CHECK(sample_criterion(SoMDistribution{Vector4d{1, 0, 0, 0}}, rng) ==
        ChoiceCriterion::Deliberative);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_criterion(SoMDistribution{Vector4d{0, 0, 1, 0}}, rng) ==
          ChoiceCriterion::Impulsive);
  }
}

TEST_CASE("sample criterion: empirical frequencies match a uniform distribution") {
  SplitMix64 rng(9);
  const SoMDistribution uniform{Vector4d{0.25, 0.25, 0.25, 0.25}};
  const int draws = 100000;
  int counts[kCriterionCount] = {0, 0, 0, 0};
  for (int i = 0; i < draws; ++i) ++counts[criterion_index(sample_criterion(uniform, rng))];
  const double sigma = std::sqrt(0.25 * 0.75 / draws);
  for (int c = 0; c < kCriterionCount; ++c) {
    CHECK(std::abs(counts[c] / static_cast<double>(draws) - 0.25) <= 4.0 * sigma);
  }
}

TEST_CASE("sample criterion consumes exactly one draw") {
  const SoMDistribution dist{Vector4d{0.3, 0.3, 0.2, 0.2}};
  SplitMix64 a(10), b(10);
  (void)sample_criterion(dist, a);
  (void)b.next_unit();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("resolve clickthrough: impulsive and routine click without consuming a draw") {
  SplitMix64 rng(11);
  const AgentProfile agent = random_agent(rng, 2, false);
  SplitMix64 a(12), b(12);
  CHECK(resolve_clickthrough(ChoiceCriterion::Impulsive, agent, a));
  CHECK(resolve_clickthrough(ChoiceCriterion::Routine, agent, a));
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("resolve clickthrough: zero deliberative probability never clicks") {
  SplitMix64 rng(13);
  AgentProfile agent = random_agent(rng, 2, false);
  agent.clickthrough[0] = 0.0;
  for (int i = 0; i < 200; ++i) {
    CHECK_FALSE(resolve_clickthrough(ChoiceCriterion::Deliberative, agent, rng));
  }
}

TEST_CASE("identical seeds reproduce identical sampling sequences") {
  SplitMix64 gen(14);
  const AgentProfile agent = random_agent(gen, 3, false);
  const CueBundle bundle = random_bundle(gen, 3);
  const SoMDistribution dist = som_distribution(bundle, agent, Regime::Prior);

  SplitMix64 a(99), b(99);
  for (int i = 0; i < 500; ++i) {
    const ChoiceCriterion ca = sample_criterion(dist, a);
    const ChoiceCriterion cb = sample_criterion(dist, b);
    REQUIRE(ca == cb);
    REQUIRE(resolve_clickthrough(ca, agent, a) == resolve_clickthrough(cb, agent, b));
  }
}

TEST_CASE("validate cue bundle") {
  CHECK(validate_cue_bundle(CueBundle{Eigen::Vector3d{1, 0, 0}}, Norm::L2).ok);

  const auto too_long = validate_cue_bundle(CueBundle{Eigen::Vector2d{0.8, 0.8}}, Norm::L2);
  CHECK_FALSE(too_long.ok);
  REQUIRE(too_long.issues.size() == 1);
  CHECK(too_long.issues[0].find("norm") != std::string::npos);

  const auto negative = validate_cue_bundle(CueBundle{Eigen::Vector2d{0.5, -0.1}}, Norm::L2);
  CHECK_FALSE(negative.ok);
  REQUIRE(negative.issues.size() == 1);
  CHECK(negative.issues[0].find("outside [0,1]") != std::string::npos);

  // boundary points under the other norms
  CHECK(validate_cue_bundle(CueBundle{Eigen::Vector2d{0.5, 0.5}}, Norm::L1).ok);
  CHECK_FALSE(validate_cue_bundle(CueBundle{Eigen::Vector2d{0.6, 0.5}}, Norm::L1).ok);
  CHECK(validate_cue_bundle(CueBundle{Eigen::Vector2d{1.0, 1.0}}, Norm::LInf).ok);
}
