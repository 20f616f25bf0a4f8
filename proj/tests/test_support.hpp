#pragma once

#include "phishsim/campaign.hpp"
#include "phishsim/model.hpp"
#include "phishsim/rng.hpp"
#include "phishsim/types.hpp"

#include <filesystem>
#include <string>

namespace phishsim::testing {

inline std::filesystem::path scenario_dir() { return std::filesystem::path(PHISHSIM_SCENARIO_DIR); }

inline std::filesystem::path scenario_path(const std::string& name) {
  return scenario_dir() / name;
}

inline AgentProfile random_agent(SplitMix64& rng, int cue_count, bool is_target) {
  AgentProfile agent;
  agent.is_target = is_target;
  agent.susceptibility_prior.resize(kCriterionCount, cue_count);
  for (int r = 0; r < kCriterionCount; ++r) {
    for (int c = 0; c < cue_count; ++c) agent.susceptibility_prior(r, c) = rng.next_unit();
  }
  agent.susceptibility_posterior = agent.susceptibility_prior;
  const int routine = criterion_index(ChoiceCriterion::Routine);
  for (int c = 0; c < cue_count; ++c) {
    const double prior = agent.susceptibility_prior(routine, c);
    agent.susceptibility_posterior(routine, c) = prior + rng.next_unit() * (1.0 - prior);
  }
  for (int r = 0; r < kCriterionCount; ++r) agent.baseline[r] = rng.next_in(0.05, 2.0);
  agent.clickthrough << rng.next_in(0.0, 0.05), rng.next_in(0.05, 0.3), 1.0, 1.0;
  return agent;
}

inline CueBundle random_bundle(SplitMix64& rng, int cue_count, Norm norm = Norm::L2) {
  VectorXd x(cue_count);
  for (int i = 0; i < cue_count; ++i) x[i] = rng.next_unit();
  const double nv = norm_value(x, norm);
  if (nv > 1.0) x /= nv;
  return CueBundle{x};
}

/// Agent whose selection probabilities are pinned by construction (bypasses
/// loader invariants on purpose; the math is well defined for any positive
/// total baseline).
inline AgentProfile forced_distribution_agent(const Vector4d& baseline, int cue_count,
                                              bool is_target,
                                              const Vector4d& clickthrough = Vector4d{0.01, 0.10,
                                                                                      1.0, 1.0}) {
  AgentProfile agent;
  agent.is_target = is_target;
  agent.susceptibility_prior = SusceptibilityMatrix::Zero(kCriterionCount, cue_count);
  agent.susceptibility_posterior = agent.susceptibility_prior;
  agent.baseline = baseline;
  agent.clickthrough = clickthrough;
  return agent;
}

inline ScenarioConfig tiny_scenario(std::vector<AgentProfile> agents, int cue_count, int horizon,
                                    std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.n = static_cast<int>(agents.size());
  cfg.m = 0;
  for (const auto& a : agents) {
    if (a.is_target) ++cfg.m;
  }
  cfg.cue_count = cue_count;
  cfg.agents = std::move(agents);
  cfg.attacker.value_of_success = 1.0;
  cfg.attacker.effort_base = 0.0;
  cfg.attacker.effort_weights = VectorXd::Zero(cue_count);
  cfg.attacker.norm = Norm::L2;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return cfg;
}

}  // namespace phishsim::testing
