#include "phishsim/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace phishsim {

namespace {

constexpr double kZ95 = 1.959963984540054;

double half_width_proportion(double p, std::uint64_t count) {
  if (count == 0) return 0.0;
  return kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(count));
}

}  // namespace

const char* breach_path_name(BreachPath p) {
  return p == BreachPath::Direct ? "direct" : "stepping_stone";
}

AttackPlan make_attack_plan(const ScenarioConfig& scenario) {
  if (scenario.agents.empty()) throw ValidationError("scenario has no agents");

  AttackPlan plan;
  const auto population = std::span<const AgentProfile>(scenario.agents);

  plan.no_insider_bundle =
      optimize_criterion_bundle(ChoiceCriterion::Impulsive, population, Regime::Prior,
                                scenario.norm)
          .best_bundle;

  const CueBundle impulsive_posterior =
      optimize_criterion_bundle(ChoiceCriterion::Impulsive, population, Regime::Posterior,
                                scenario.norm)
          .best_bundle;
  const CueBundle routine_posterior =
      optimize_criterion_bundle(ChoiceCriterion::Routine, population, Regime::Posterior,
                                scenario.norm)
          .best_bundle;

  plan.insider_value_impulsive =
      objective(impulsive_posterior, population, scenario.attacker, Regime::Posterior);
  plan.insider_value_routine =
      objective(routine_posterior, population, scenario.attacker, Regime::Posterior);
  if (plan.insider_value_routine > plan.insider_value_impulsive) {
    plan.insider_aim = ChoiceCriterion::Routine;
    plan.insider_bundle = routine_posterior;
  } else {
    plan.insider_aim = ChoiceCriterion::Impulsive;
    plan.insider_bundle = impulsive_posterior;
  }

  plan.no_insider_dists.reserve(scenario.agents.size());
  plan.insider_dists.reserve(scenario.agents.size());
  for (const auto& agent : scenario.agents) {
    plan.no_insider_dists.push_back(
        som_distribution(plan.no_insider_bundle, agent, Regime::Prior));
    plan.insider_dists.push_back(som_distribution(plan.insider_bundle, agent, Regime::Posterior));
  }
  return plan;
}

void step(CampaignState& state, const ScenarioConfig& scenario, const AttackPlan& plan,
          SplitMix64& rng) {
  if (state.info == InfoState::Breached) {
    throw UsageError("step: campaign already breached");
  }
  if (state.round >= scenario.horizon) {
    throw UsageError("step: horizon exhausted");
  }

  const bool insider = state.info == InfoState::Insider;
  const auto& dists = insider ? plan.insider_dists : plan.no_insider_dists;
  const int round = state.round + 1;

  bool target_click = false;
  bool nontarget_click = false;
  for (int i = 0; i < scenario.n; ++i) {
    const AgentProfile& agent = scenario.agents[static_cast<std::size_t>(i)];
    const ChoiceCriterion c = sample_criterion(dists[static_cast<std::size_t>(i)], rng);
    const bool clicked = resolve_clickthrough(c, agent, rng);
    state.event_log.push_back({round, i, c, clicked, agent.is_target});
    if (clicked) {
      if (agent.is_target) {
        target_click = true;
      } else {
        nontarget_click = true;
      }
    }
  }

  state.round_log.push_back({round, insider ? plan.insider_aim : ChoiceCriterion::Impulsive,
                             insider ? Regime::Posterior : Regime::Prior});
  state.round = round;

  // Breach takes precedence over a same-round foothold.
  if (target_click) {
    state.info = InfoState::Breached;
    state.breach_round = round;
    state.breach_path = (state.insider_acquired_round && *state.insider_acquired_round < round)
                            ? BreachPath::SteppingStone
                            : BreachPath::Direct;
  } else if (nontarget_click && state.info == InfoState::NoInsider) {
    state.info = InfoState::Insider;
    state.insider_acquired_round = round;
  }
}

void step(CampaignState& state, const ScenarioConfig& scenario, SplitMix64& rng) {
  const AttackPlan plan = make_attack_plan(scenario);
  step(state, scenario, plan, rng);
}

ReplicationRecord run_replication(const ScenarioConfig& scenario, const AttackPlan& plan,
                                  std::uint64_t replication_index) {
  SplitMix64 rng = SplitMix64::for_stream(scenario.seed, replication_index);
  CampaignState state;
  while (state.info != InfoState::Breached && state.round < scenario.horizon) {
    step(state, scenario, plan, rng);
  }

  ReplicationRecord record;
  record.replication = replication_index;
  record.breached = state.info == InfoState::Breached;
  record.breach_round = state.breach_round;
  record.breach_path = state.breach_path;
  record.rounds = state.round;

  for (const auto& ev : state.event_log) {
    record.recipient_payoff += ev.clicked ? -scenario.payoffs.c_fn : scenario.payoffs.b_tp;
    if (ev.clicked) {
      auto& first = ev.was_target ? record.first_target_click_round
                                  : record.first_nontarget_click_round;
      if (!first || ev.round < *first) first = ev.round;
    }
  }
  for (const auto& rr : state.round_log) {
    if (rr.regime == Regime::Posterior) {
      ++record.insider_rounds;
      if (rr.aim == ChoiceCriterion::Routine) ++record.insider_rounds_routine_aimed;
    }
  }
  return record;
}

ReplicationRecord run_replication(const ScenarioConfig& scenario,
                                  std::uint64_t replication_index) {
  return run_replication(scenario, make_attack_plan(scenario), replication_index);
}

Aggregates aggregate_records(const std::vector<ReplicationRecord>& records) {
  Aggregates agg;
  agg.replications = records.size();

  std::uint64_t stepping = 0;
  double rounds_sum = 0.0;
  double rounds_sq = 0.0;
  double payoff_sum = 0.0;
  double payoff_sq = 0.0;
  for (const auto& r : records) {
    if (r.breached) {
      ++agg.breaches;
      if (r.breach_path == BreachPath::SteppingStone) ++stepping;
      const double br = static_cast<double>(*r.breach_round);
      rounds_sum += br;
      rounds_sq += br * br;
    }
    payoff_sum += r.recipient_payoff;
    payoff_sq += r.recipient_payoff * r.recipient_payoff;
  }
  agg.censored = agg.replications - agg.breaches;

  if (agg.replications > 0) {
    const double n = static_cast<double>(agg.replications);
    agg.breach_probability = static_cast<double>(agg.breaches) / n;
    agg.breach_probability_hw = half_width_proportion(agg.breach_probability, agg.replications);
    agg.mean_recipient_payoff = payoff_sum / n;
    if (agg.replications > 1) {
      const double var =
          std::max(0.0, (payoff_sq - n * agg.mean_recipient_payoff * agg.mean_recipient_payoff) /
                            (n - 1.0));
      agg.mean_recipient_payoff_hw = kZ95 * std::sqrt(var / n);
    }
  }
  if (agg.breaches > 0) {
    const double b = static_cast<double>(agg.breaches);
    agg.stepping_stone_fraction = static_cast<double>(stepping) / b;
    agg.stepping_stone_fraction_hw =
        half_width_proportion(*agg.stepping_stone_fraction, agg.breaches);
    agg.mean_rounds_to_breach = rounds_sum / b;
    if (agg.breaches > 1) {
      const double var = std::max(
          0.0, (rounds_sq - b * *agg.mean_rounds_to_breach * *agg.mean_rounds_to_breach) /
                   (b - 1.0));
      agg.mean_rounds_to_breach_hw = kZ95 * std::sqrt(var / b);
    } else {
      agg.mean_rounds_to_breach_hw = 0.0;
    }
  }
  return agg;
}

SimulationResult run_monte_carlo(const ScenarioConfig& scenario, std::uint64_t replications,
                                 unsigned threads) {
  if (replications < 1) throw ValidationError("run_monte_carlo requires replications >= 1");
  const AttackPlan plan = make_attack_plan(scenario);

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, replications));

  SimulationResult result;
  result.records.resize(replications);

  if (workers <= 1) {
    for (std::uint64_t r = 0; r < replications; ++r) {
      result.records[r] = run_replication(scenario, plan, r);
    }
  } else {
    // Disjoint contiguous chunks; records land in index order regardless of
    // scheduling because each replication owns its index-derived stream.
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (replications + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
      const std::uint64_t hi = std::min(replications, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi]() {
        for (std::uint64_t r = lo; r < hi; ++r) {
          result.records[r] = run_replication(scenario, plan, r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  result.aggregates = aggregate_records(result.records);
  return result;
}

}  // namespace phishsim
