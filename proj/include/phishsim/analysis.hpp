#pragma once

#include "phishsim/campaign.hpp"
#include "phishsim/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace phishsim {

struct FirstClickProbabilities {
  double nontarget = 0.0;
  double target = 0.0;
};

/// Closed-form round-one click probabilities when every agent enters the
/// Impulsive criterion with probability `pi3_max`: at least one of the n-m
/// non-targets clicks with probability 1-(1-pi3_max)^(n-m), and at least one
/// of the m targets with probability 1-(1-pi3_max)^m.
FirstClickProbabilities first_click_probabilities(double pi3_max, int n, int m);

/// Breach probability accumulated disjunctively over k independent emails
/// each succeeding with probability p: 1-(1-p)^k.
double disjunctive_accumulation(double p, std::uint64_t k);

/// Defensive interventions on a population. Scaling kinds multiply the named
/// quantities; Impulsive/Routine click-through probabilities are never
/// touched (they are structurally 1).
struct TrainingIntervention {
  enum class Kind {
    ReduceRho1,             // scale the Deliberative click-through probability
    ReduceRho2,             // scale the Behavioral click-through probability
    RaiseChi1,              // multiply the Deliberative baseline (factor >= 1)
    ScaleChi34,             // multiply the Impulsive and Routine baselines (factor in (0,1])
    ScaleSusceptibility34,  // multiply susceptibility rows 3 and 4, both regimes
  };
  Kind kind = Kind::ScaleChi34;
  double magnitude = 1.0;
};

const char* intervention_kind_name(TrainingIntervention::Kind k);

/// Returns a transformed copy of the population. Throws ValidationError when
/// the intervention's magnitude is out of range for its kind or the
/// transformed profiles would violate profile invariants.
std::vector<AgentProfile> apply_training(std::span<const AgentProfile> population,
                                         const TrainingIntervention& intervention);

enum class TestEmailMode { Analytic, Sampled };

/// Result of probing a population with one simulated phishing email. A single
/// email carries one specific cue bundle, so the report measures
/// susceptibility to that bundle only; `single_bundle_caveat` is always set
/// to remind consumers that such tests must be varied and repeated.
struct TestEmailReport {
  double overall_click_rate = 0.0;
  Vector4d mean_selection = Vector4d::Zero();      // mean selection probability per criterion
  Vector4d click_contribution = Vector4d::Zero();  // mean selection * clickthrough per criterion
  CueBundle bundle;
  TestEmailMode mode = TestEmailMode::Analytic;
  bool single_bundle_caveat = true;
};

/// Exact population-mean click rate and its per-criterion decomposition.
TestEmailReport evaluate_test_email_analytic(std::span<const AgentProfile> population,
                                             const CueBundle& bundle, Regime regime);

/// Monte Carlo variant: simulates `sends` send-events, cycling through the
/// population in index order, drawing criterion and click-through per event.
TestEmailReport evaluate_test_email_sampled(std::span<const AgentProfile> population,
                                            const CueBundle& bundle, Regime regime,
                                            std::uint64_t sends, std::uint64_t seed);

struct PolicyRow {
  std::string label;
  double breach_probability = 0.0;
  double ci_halfwidth = 0.0;
  double delta_vs_base = 0.0;
};

struct PolicyComparison {
  std::vector<PolicyRow> rows;  // base scenario first
};

/// Runs the Monte Carlo campaign on the base scenario and on each
/// intervention-transformed scenario with a common master seed (common random
/// numbers), reporting breach probabilities, half widths, and deltas.
PolicyComparison policy_comparison(const ScenarioConfig& scenario,
                                   std::span<const TrainingIntervention> interventions,
                                   std::uint64_t replications, unsigned threads = 0);

}  // namespace phishsim
