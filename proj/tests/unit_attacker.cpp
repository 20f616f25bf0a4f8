#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phishsim/attacker.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace phishsim;
using phishsim::testing::forced_distribution_agent;
using phishsim::testing::random_agent;
using phishsim::testing::random_bundle;

namespace {

AttackerParams params_with(double v, double base, VectorXd weights, Norm norm = Norm::L2) {
  AttackerParams p;
  p.value_of_success = v;
  p.effort_base = base;
  p.effort_weights = std::move(weights);
  p.norm = norm;
  return p;
}

std::vector<AgentProfile> random_population(SplitMix64& rng, int n, int cue_count) {
  std::vector<AgentProfile> agents;
  agents.push_back(random_agent(rng, cue_count, true));  // at least one target
  for (int i = 1; i < n; ++i) agents.push_back(random_agent(rng, cue_count, rng.next_unit() < 0.4));
  return agents;
}

}  // namespace

TEST_CASE("effort: linear in the bundle") {
  const auto params = params_with(1.0, 0.1, Eigen::Vector2d{1.0, 0.2});
  CHECK(effort(CueBundle{Eigen::Vector2d{0, 0}}, params) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(effort(CueBundle{Eigen::Vector2d{0.3, 0.5}}, params) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("effort: doubling the weights doubles the marginal part") {
  const auto params = params_with(1.0, 0.25, Eigen::Vector3d{0.5, 0.1, 0.9});
  auto doubled = params;
  doubled.effort_weights *= 2.0;
  SplitMix64 rng(20);
  for (int i = 0; i < 20; ++i) {
    const CueBundle bundle = random_bundle(rng, 3);
    const double base_part = effort(bundle, params) - params.effort_base;
    CHECK(effort(bundle, doubled) - doubled.effort_base ==
          doctest::Approx(2.0 * base_part).epsilon(1e-12));
  }
}

TEST_CASE("effort: dimension mismatch is a configuration error") {
  const auto params = params_with(1.0, 0.0, Eigen::Vector2d{0.1, 0.1});
  CHECK_THROWS_AS(effort(CueBundle{Eigen::Vector3d{0.1, 0.1, 0.1}}, params), ValidationError);
}

TEST_CASE("objective: hand-evaluated single-target case") {
  // target always enters the impulsive criterion, which clicks with certainty
  std::vector<AgentProfile> population{
      forced_distribution_agent(Vector4d{0, 0, 1, 0}, 2, true)};
  const auto params = params_with(10.0, 0.5, Eigen::Vector2d{0, 0});
  const CueBundle bundle{Eigen::Vector2d{0.2, 0.1}};
  CHECK(objective(bundle, population, params, Regime::Prior) ==
        doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("objective: homogeneous of degree one in the success value when effort is zero") {
  SplitMix64 rng(21);
  auto population = random_population(rng, 4, 3);
  const CueBundle bundle = random_bundle(rng, 3);
  const auto params = params_with(3.0, 0.0, Eigen::Vector3d{0, 0, 0});
  auto scaled = params;
  scaled.value_of_success *= 7.5;
  CHECK(objective(bundle, population, scaled, Regime::Prior) ==
        doctest::Approx(7.5 * objective(bundle, population, params, Regime::Prior)).epsilon(1e-12));
}

TEST_CASE("objective: additive over identical targets") {
  SplitMix64 rng(22);
  AgentProfile target = random_agent(rng, 2, true);
  const auto params = params_with(5.0, 0.0, Eigen::Vector2d{0, 0});
  const CueBundle bundle = random_bundle(rng, 2);
  std::vector<AgentProfile> one{target};
  std::vector<AgentProfile> two{target, target};
  CHECK(objective(bundle, two, params, Regime::Prior) ==
        doctest::Approx(2.0 * objective(bundle, one, params, Regime::Prior)).epsilon(1e-12));
}

TEST_CASE("objective: empty target set is a domain error") {
  SplitMix64 rng(23);
  std::vector<AgentProfile> population{random_agent(rng, 2, false)};
  const auto params = params_with(1.0, 0.0, Eigen::Vector2d{0, 0});
  CHECK_THROWS_AS(objective(random_bundle(rng, 2), population, params, Regime::Prior),
                  ValidationError);
}

TEST_CASE("objective gradient matches central finite differences") {
  SplitMix64 rng(24);
  for (int trial = 0; trial < 25; ++trial) {
    const int cue_count = 2 + static_cast<int>(rng.next_u64() % 2);
    auto population = random_population(rng, 3, cue_count);
    VectorXd weights(cue_count);
    for (int i = 0; i < cue_count; ++i) weights[i] = rng.next_in(0.0, 0.5);
    const auto params = params_with(rng.next_in(1.0, 10.0), rng.next_in(0.0, 0.3), weights);
    const Regime regime = rng.next_unit() < 0.5 ? Regime::Prior : Regime::Posterior;

    VectorXd x(cue_count);
    for (int i = 0; i < cue_count; ++i) x[i] = rng.next_in(0.05, 0.6);
    const VectorXd analytic = objective_gradient(CueBundle{x}, population, params, regime);
    const double h = 1e-6;
    for (int i = 0; i < cue_count; ++i) {
      VectorXd hi = x, lo = x;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (objective(CueBundle{hi}, population, params, regime) -
                         objective(CueBundle{lo}, population, params, regime)) /
                        (2.0 * h);
      CHECK(analytic[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("optimize: zero susceptibility with positive effort weights yields the zero bundle") {
  std::vector<AgentProfile> population{
      forced_distribution_agent(Vector4d{1, 1, 1, 1}, 2, true)};
  const auto params = params_with(4.0, 0.1, Eigen::Vector2d{0.3, 0.7});
  const auto result = optimize_bundle(population, params, Regime::Prior);
  CHECK(result.best_bundle.emphasis.isZero(0.0));
  CHECK(result.converged);
}

TEST_CASE("optimize: feasibility of the returned bundle") {
  SplitMix64 rng(25);
  for (int trial = 0; trial < 15; ++trial) {
    const int cue_count = 2 + static_cast<int>(rng.next_u64() % 3);
    auto population = random_population(rng, 3, cue_count);
    VectorXd weights(cue_count);
    for (int i = 0; i < cue_count; ++i) weights[i] = rng.next_in(0.0, 0.4);
    const Norm norm = std::array{Norm::L1, Norm::L2, Norm::LInf}[rng.next_u64() % 3];
    const auto params = params_with(rng.next_in(1.0, 8.0), 0.05, weights, norm);
    const auto result = optimize_bundle(population, params, Regime::Prior);
    CHECK(validate_cue_bundle(result.best_bundle, norm).ok);
  }
}

TEST_CASE("optimize: invariant to population order") {
  SplitMix64 rng(26);
  auto population = random_population(rng, 5, 2);
  const auto params = params_with(6.0, 0.1, Eigen::Vector2d{0.2, 0.1});
  const auto forward = optimize_bundle(population, params, Regime::Prior);
  std::reverse(population.begin(), population.end());
  const auto reversed = optimize_bundle(population, params, Regime::Prior);
  CHECK(forward.best_value == doctest::Approx(reversed.best_value).epsilon(1e-9));
}

TEST_CASE("grid oracle: step one enumerates only the feasible corners") {
  SplitMix64 rng(27);
  auto population = random_population(rng, 2, 2);
  const auto params = params_with(2.0, 0.0, Eigen::Vector2d{0.1, 0.2});
  const auto result = grid_oracle_optimize(population, params, Regime::Prior, 1.0);
  CHECK(result.evaluations == 3);  // (1,1) lies outside the Euclidean ball
  const double value_00 = objective(CueBundle{Eigen::Vector2d{0, 0}}, population, params, Regime::Prior);
  const double value_01 = objective(CueBundle{Eigen::Vector2d{0, 1}}, population, params, Regime::Prior);
  const double value_10 = objective(CueBundle{Eigen::Vector2d{1, 0}}, population, params, Regime::Prior);
  CHECK(result.best_value == doctest::Approx(std::max({value_00, value_01, value_10})).epsilon(1e-12));
}

TEST_CASE("grid oracle: constant objective breaks ties lexicographically") {
  std::vector<AgentProfile> population{
      forced_distribution_agent(Vector4d{1, 2, 3, 4}, 2, true)};
  const auto params = params_with(1.0, 0.0, Eigen::Vector2d{0, 0});
  const auto result = grid_oracle_optimize(population, params, Regime::Prior, 0.5);
  CHECK(result.best_bundle.emphasis.isZero(0.0));
}

TEST_CASE("grid oracle: refuses cue dimensions above four") {
  SplitMix64 rng(28);
  auto population = random_population(rng, 2, 5);
  const auto params = params_with(1.0, 0.0, VectorXd::Zero(5));
  CHECK_THROWS_WITH_AS(grid_oracle_optimize(population, params, Regime::Prior, 0.1),
                       doctest::Contains("A <= 4"), ValidationError);
}

TEST_CASE("gradient ascent does not lose to the lattice") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int cue_count = 2 + static_cast<int>(rng.next_u64() % 2);
    auto population = random_population(rng, 2 + static_cast<int>(rng.next_u64() % 3), cue_count);
    VectorXd weights(cue_count);
    for (int i = 0; i < cue_count; ++i) weights[i] = rng.next_in(0.0, 0.5);
    const auto params = params_with(rng.next_in(1.0, 15.0), rng.next_in(0.0, 0.4), weights);
    const Regime regime = rng.next_unit() < 0.5 ? Regime::Prior : Regime::Posterior;
    const auto gradient = optimize_bundle(population, params, regime);
    const auto grid = grid_oracle_optimize(population, params, regime, 0.05);
    CHECK(gradient.best_value >= grid.best_value - 1e-3);
  }
}

TEST_CASE("criterion bundle: a lone responsive cue is fully emphasized") {
  AgentProfile agent = forced_distribution_agent(Vector4d{0.5, 0.5, 0.5, 0.5}, 2, true);
  agent.susceptibility_prior.row(criterion_index(ChoiceCriterion::Impulsive)) << 1.0, 0.0;
  agent.susceptibility_posterior = agent.susceptibility_prior;
  std::vector<AgentProfile> population{agent};
  const auto [bundle, value] =
      criterion_optimal_bundle(ChoiceCriterion::Impulsive, population, Regime::Prior, 0.1);
  CHECK(bundle.emphasis[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bundle.emphasis[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("criterion bundle: identical rows and uniform baselines cancel completely") {
  SplitMix64 rng(30);
  AgentProfile agent = random_agent(rng, 2, true);
  for (int r = 1; r < kCriterionCount; ++r) {
    agent.susceptibility_prior.row(r) = agent.susceptibility_prior.row(0);
  }
  agent.susceptibility_posterior = agent.susceptibility_prior;
  agent.baseline.setConstant(0.7);
  std::vector<AgentProfile> population{agent};
  const auto [bundle, value] =
      criterion_optimal_bundle(ChoiceCriterion::Impulsive, population, Regime::Prior, 0.25);
  // selection probability is the baseline share at every feasible bundle, so
  // the lattice tie-break lands on the zero bundle
  CHECK(value == doctest::Approx(agent.baseline[2] / agent.baseline.sum()).epsilon(1e-12));
  CHECK(bundle.emphasis.isZero(0.0));
}

TEST_CASE("criterion bundle: refining the lattice only improves the attained mean") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto population = random_population(rng, 3, 2);
    for (auto c : {ChoiceCriterion::Behavioral, ChoiceCriterion::Routine}) {
      const auto coarse = criterion_optimal_bundle(c, population, Regime::Posterior, 0.2);
      const auto fine = criterion_optimal_bundle(c, population, Regime::Posterior, 0.1);
      CHECK(fine.second >= coarse.second - 1e-12);  // the halved lattice is a superset
      CHECK(fine.second - coarse.second <= 0.1);    // step-induced slack only
    }
  }
}

TEST_CASE("dominance verdict primitives") {
  CHECK(behavioral_dominance_verdict(0.1, 0.3, 0.5) == std::optional<bool>(true));  // 0.1 < 0.6
  CHECK(behavioral_dominance_verdict(0.6, 0.3, 0.5) == std::optional<bool>(false));
  CHECK(behavioral_dominance_verdict(0.6, 0.3, 0.0) == std::nullopt);
  // exact boundary: the strict inequality fails
  CHECK(behavioral_dominance_verdict(0.5, 0.25, 0.5) == std::optional<bool>(false));

  CHECK(routine_dominance_verdict(0.5, 0.25, 0.75, 0.25) == std::optional<bool>(true));  // 2 < 3
  CHECK(routine_dominance_verdict(0.75, 0.25, 0.5, 0.25) == std::optional<bool>(false)); // 3 < 2 fails
  CHECK(routine_dominance_verdict(0.5, 0.0, 0.75, 0.25) == std::nullopt);
  CHECK(routine_dominance_verdict(0.5, 0.25, 0.75, 0.0) == std::nullopt);

  CHECK(deliberative_dominance_verdict(0.1, 0.4) == std::optional<bool>(true));
  CHECK(deliberative_dominance_verdict(0.4, 0.4) == std::optional<bool>(false));
}

TEST_CASE("dominance report: shipped example scenario confirms all three verdicts") {
  // built inline to keep this suite independent of the io module
  std::vector<AgentProfile> population;
  for (int i = 0; i < 10; ++i) {
    AgentProfile agent;
    agent.is_target = i < 2;
    agent.susceptibility_prior.resize(kCriterionCount, 2);
    agent.susceptibility_prior << 0.0, 0.0, 0.08, 0.0, 0.04, 0.0, 0.0, 0.03;
    agent.susceptibility_posterior = agent.susceptibility_prior;
    agent.susceptibility_posterior(3, 1) = 0.60;
    agent.baseline << 2.0, 0.5, 0.10, 0.04;
    agent.clickthrough << 0.01, 0.10, 1.0, 1.0;
    population.push_back(agent);
  }
  const auto params = params_with(12.0, 0.04, Eigen::Vector2d{0.08, 0.18});
  const DominanceReport report = dominance_report(population, params, 0.01);
  CHECK(report.deliberative_dominated == std::optional<bool>(true));
  CHECK(report.behavioral_dominated_by_impulsive == std::optional<bool>(true));
  CHECK(report.routine_dominates_impulsive_posterior == std::optional<bool>(true));
  CHECK(verdicts_consistent(report));
  CHECK(report.prior[criterion_index(ChoiceCriterion::Impulsive)].max_selection ==
        doctest::Approx(0.14 / 2.76).epsilon(1e-9));
  CHECK(report.posterior[criterion_index(ChoiceCriterion::Routine)].max_selection ==
        doctest::Approx(0.64 / 3.24).epsilon(1e-9));
}

TEST_CASE("dominance report: verdicts always recompute from their own operands") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    auto population = random_population(rng, 3, 2);
    VectorXd weights(2);
    weights << rng.next_in(0.0, 0.4), rng.next_in(0.0, 0.4);
    const auto params = params_with(rng.next_in(1.0, 10.0), rng.next_in(0.0, 0.2), weights);
    CHECK(verdicts_consistent(dominance_report(population, params, 0.1)));
  }
}

TEST_CASE("deliberative channel never beats behavioral when only clickthrough differs") {
  SplitMix64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    auto population = random_population(rng, 3, 2);
    for (auto& agent : population) {
      // share the targeting characteristics between the two channels
      agent.susceptibility_prior.row(0) = agent.susceptibility_prior.row(1);
      agent.susceptibility_posterior.row(0) = agent.susceptibility_posterior.row(1);
      agent.baseline[0] = agent.baseline[1];
      agent.clickthrough[0] = 0.5 * agent.clickthrough[1];  // strictly lower rho1
    }
    const auto params = params_with(5.0, 0.1, Eigen::Vector2d{0.2, 0.3});
    const DominanceReport report = dominance_report(population, params, 0.1);
    CHECK(report.deliberative_left <= report.deliberative_right + 1e-12);
  }
}

TEST_CASE("mixture dominance check") {
  const std::vector<double> values{3.0, 1.0};
  const std::vector<double> even{0.5, 0.5};
  CHECK(mixture_dominance_check(values, even));

  const std::vector<double> degenerate{1.0, 0.0};
  CHECK(mixture_dominance_check(values, degenerate));

  const std::vector<double> constant{2.0, 2.0, 2.0};
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(mixture_dominance_check(constant, thirds));

  const std::vector<double> bad_weights{0.5, 0.2};
  CHECK_THROWS_AS(mixture_dominance_check(values, bad_weights), ValidationError);
}

TEST_CASE("mixture dominance holds over randomized values and weightings") {
  SplitMix64 rng(35);
  for (int trial = 0; trial < 2000; ++trial) {
    const int count = 2 + static_cast<int>(rng.next_u64() % 6);
    std::vector<double> values(count), weights(count);
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
      values[i] = rng.next_in(0.0, 10.0);
      weights[i] = rng.next_in(0.01, 1.0);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
    CHECK(mixture_dominance_check(values, weights));
  }
}
