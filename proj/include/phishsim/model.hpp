#pragma once

#include "phishsim/rng.hpp"
#include "phishsim/types.hpp"

#include <string>
#include <vector>

namespace phishsim {

/// How well an email's cue emphases line up with one agent's pull toward
/// criterion `c`: the agent's baseline propensity plus the dot product of the
/// regime-selected susceptibility row with the cue bundle. Positive whenever
/// the agent's baselines are positive.
double match_quality(const CueBundle& bundle, const AgentProfile& agent, ChoiceCriterion c,
                     Regime regime);

/// Selection probabilities over the four criteria: each criterion's match
/// quality divided by the sum over all four. Scale-invariant in the agent's
/// baseline/susceptibility and always a proper distribution.
SoMDistribution som_distribution(const CueBundle& bundle, const AgentProfile& agent,
                                 Regime regime);

/// Draws the operative criterion by inverse CDF over the fixed order
/// Deliberative, Behavioral, Impulsive, Routine. Consumes exactly one
/// uniform draw.
ChoiceCriterion sample_criterion(const SoMDistribution& dist, SplitMix64& rng);

/// Resolves click vs. quarantine given the operative criterion. Impulsive and
/// Routine click deterministically and consume no draw; Deliberative and
/// Behavioral consume exactly one uniform draw.
bool resolve_clickthrough(ChoiceCriterion c, const AgentProfile& agent, SplitMix64& rng);

struct BundleValidation {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Checks component bounds ([0,1] each) and the norm-ball constraint
/// (norm <= 1 + 1e-12). Violations are returned, never thrown.
BundleValidation validate_cue_bundle(const CueBundle& bundle, Norm norm);

/// Norm of an emphasis vector under the configured norm tag.
double norm_value(const VectorXd& v, Norm norm);

}  // namespace phishsim
