#pragma once

#include "phishsim/attacker.hpp"
#include "phishsim/model.hpp"
#include "phishsim/rng.hpp"
#include "phishsim/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace phishsim {

/// Attacker information state. Transitions only move forward:
/// NoInsider -> Insider -> Breached, or NoInsider -> Breached directly.
enum class InfoState { NoInsider, Insider, Breached };

enum class BreachPath { Direct, SteppingStone };

const char* breach_path_name(BreachPath p);

struct ResponseEvent {
  int round = 0;  // 1-based
  int agent = 0;
  ChoiceCriterion criterion = ChoiceCriterion::Deliberative;
  bool clicked = false;
  bool was_target = false;
};

struct RoundRecord {
  int round = 0;
  ChoiceCriterion aim = ChoiceCriterion::Impulsive;  // criterion the email was designed to invoke
  Regime regime = Regime::Prior;
};

struct CampaignState {
  int round = 0;  // completed rounds
  InfoState info = InfoState::NoInsider;
  std::optional<int> insider_acquired_round;
  std::optional<int> breach_round;
  std::optional<BreachPath> breach_path;
  std::vector<ResponseEvent> event_log;
  std::vector<RoundRecord> round_log;
};

/// Full experiment description. Agents are always materialized here; the
/// scenario loader expands generator documents before anything draws from the
/// simulation seed.
struct ScenarioConfig {
  int n = 0;          // organization size
  int m = 0;          // number of targets, 1 <= m < n
  int cue_count = 0;  // A
  std::vector<AgentProfile> agents;
  AttackerParams attacker;
  int horizon = 100;
  PayoffMatrix payoffs;
  Norm norm = Norm::L2;
  std::uint64_t seed = 0;
  std::vector<std::string> cue_labels;  // descriptive metadata only, may be empty
};

/// Per-scenario precomputation of the attacker's play. The population is
/// static, so re-optimizing every round reproduces these same bundles; the
/// plan computes them once. Without insider information the attacker aims at
/// the Impulsive criterion; with it, the attacker compares the net values of
/// the Impulsive- and Routine-aimed bundles under the posterior regime and
/// plays the better one.
struct AttackPlan {
  CueBundle no_insider_bundle;
  CueBundle insider_bundle;
  ChoiceCriterion insider_aim = ChoiceCriterion::Impulsive;
  double insider_value_impulsive = 0.0;
  double insider_value_routine = 0.0;
  std::vector<SoMDistribution> no_insider_dists;  // per agent, prior regime
  std::vector<SoMDistribution> insider_dists;     // per agent, posterior regime
};

AttackPlan make_attack_plan(const ScenarioConfig& scenario);

/// Advances the campaign one round: the planned email is broadcast to all n
/// recipients, each draws a criterion and resolves click-through in agent
/// index order, and the information state updates. Any target click breaches;
/// otherwise any non-target click yields insider information; otherwise only
/// the round counter moves. Throws UsageError when the state is already
/// breached or the horizon is exhausted.
void step(CampaignState& state, const ScenarioConfig& scenario, const AttackPlan& plan,
          SplitMix64& rng);

/// Convenience overload that builds the plan on the fly.
void step(CampaignState& state, const ScenarioConfig& scenario, SplitMix64& rng);

struct ReplicationRecord {
  std::uint64_t replication = 0;
  bool breached = false;
  std::optional<int> breach_round;
  std::optional<BreachPath> breach_path;
  int rounds = 0;
  double recipient_payoff = 0.0;
  // extra observables kept in memory (not serialized to the results table)
  std::optional<int> first_target_click_round;
  std::optional<int> first_nontarget_click_round;
  int insider_rounds = 0;
  int insider_rounds_routine_aimed = 0;
};

/// Runs one replication to breach or horizon. The random stream is derived
/// from (scenario.seed, replication_index), with draws consumed in round,
/// then agent index, then purpose (criterion, click) order. Every email in a
/// campaign is malicious, so each recipient response accrues either the
/// false-negative cost (click) or the true-positive benefit (quarantine).
ReplicationRecord run_replication(const ScenarioConfig& scenario, const AttackPlan& plan,
                                  std::uint64_t replication_index);

ReplicationRecord run_replication(const ScenarioConfig& scenario, std::uint64_t replication_index);

struct Aggregates {
  std::uint64_t replications = 0;
  std::uint64_t breaches = 0;
  std::uint64_t censored = 0;
  double breach_probability = 0.0;
  double breach_probability_hw = 0.0;
  std::optional<double> stepping_stone_fraction;  // among breaches
  std::optional<double> stepping_stone_fraction_hw;
  std::optional<double> mean_rounds_to_breach;
  std::optional<double> mean_rounds_to_breach_hw;
  double mean_recipient_payoff = 0.0;
  double mean_recipient_payoff_hw = 0.0;
};

struct SimulationResult {
  std::vector<ReplicationRecord> records;
  Aggregates aggregates;
};

/// Recomputes aggregate statistics (with normal-approximation 95% half
/// widths) from a record set.
Aggregates aggregate_records(const std::vector<ReplicationRecord>& records);

/// Runs independent replications 0..replications-1 and aggregates them.
/// `threads` caps worker parallelism (0 = hardware concurrency); per-index
/// streams and index-ordered assembly make the result identical for any
/// thread count or schedule.
SimulationResult run_monte_carlo(const ScenarioConfig& scenario, std::uint64_t replications,
                                 unsigned threads = 0);

}  // namespace phishsim
