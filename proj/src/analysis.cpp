#include "phishsim/analysis.hpp"

#include <cmath>
#include <sstream>

namespace phishsim {

const char* intervention_kind_name(TrainingIntervention::Kind k) {
  switch (k) {
    case TrainingIntervention::Kind::ReduceRho1: return "reduce_rho1";
    case TrainingIntervention::Kind::ReduceRho2: return "reduce_rho2";
    case TrainingIntervention::Kind::RaiseChi1: return "raise_chi1";
    case TrainingIntervention::Kind::ScaleChi34: return "scale_chi34";
    case TrainingIntervention::Kind::ScaleSusceptibility34: return "scale_susceptibility34";
  }
  return "?";
}

FirstClickProbabilities first_click_probabilities(double pi3_max, int n, int m) {
  if (!(pi3_max >= 0.0 && pi3_max <= 1.0)) {
    throw ValidationError("first_click_probabilities: pi3_max must lie in [0,1]");
  }
  if (m < 1 || m >= n) {
    throw ValidationError("first_click_probabilities: requires 1 <= m < n");
  }
  const double q = 1.0 - pi3_max;
  return {1.0 - std::pow(q, static_cast<double>(n - m)),
          1.0 - std::pow(q, static_cast<double>(m))};
}

double disjunctive_accumulation(double p, std::uint64_t k) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("disjunctive_accumulation: p must lie in [0,1]");
  }
  if (k == 0) return 0.0;
  return 1.0 - std::pow(1.0 - p, static_cast<double>(k));
}

namespace {

void validate_intervention(const TrainingIntervention& intervention) {
  using Kind = TrainingIntervention::Kind;
  const double f = intervention.magnitude;
  if (!std::isfinite(f)) throw ValidationError("intervention magnitude must be finite");
  switch (intervention.kind) {
    case Kind::ReduceRho1:
    case Kind::ReduceRho2:
      if (f < 0.0 || f > 1.0) {
        throw ValidationError("click-through reduction factor must lie in [0,1]");
      }
      break;
    case Kind::RaiseChi1:
      if (f < 1.0) throw ValidationError("baseline raise factor must be >= 1");
      break;
    case Kind::ScaleChi34:
    case Kind::ScaleSusceptibility34:
      if (!(f > 0.0) || f > 1.0) {
        throw ValidationError("scaling factor must lie in (0,1]");
      }
      break;
  }
}

}  // namespace

std::vector<AgentProfile> apply_training(std::span<const AgentProfile> population,
                                         const TrainingIntervention& intervention) {
  using Kind = TrainingIntervention::Kind;
  validate_intervention(intervention);

  std::vector<AgentProfile> out(population.begin(), population.end());
  const double f = intervention.magnitude;
  const int i3 = criterion_index(ChoiceCriterion::Impulsive);
  const int i4 = criterion_index(ChoiceCriterion::Routine);
  for (auto& agent : out) {
    switch (intervention.kind) {
      case Kind::ReduceRho1:
        agent.clickthrough[criterion_index(ChoiceCriterion::Deliberative)] *= f;
        break;
      case Kind::ReduceRho2:
        agent.clickthrough[criterion_index(ChoiceCriterion::Behavioral)] *= f;
        break;
      case Kind::RaiseChi1:
        agent.baseline[criterion_index(ChoiceCriterion::Deliberative)] *= f;
        if (!std::isfinite(agent.baseline[criterion_index(ChoiceCriterion::Deliberative)])) {
          throw ValidationError("raised baseline is not finite");
        }
        break;
      case Kind::ScaleChi34:
        agent.baseline[i3] *= f;
        agent.baseline[i4] *= f;
        break;
      case Kind::ScaleSusceptibility34:
        agent.susceptibility_prior.row(i3) *= f;
        agent.susceptibility_prior.row(i4) *= f;
        agent.susceptibility_posterior.row(i3) *= f;
        agent.susceptibility_posterior.row(i4) *= f;
        break;
    }
  }
  return out;
}

TestEmailReport evaluate_test_email_analytic(std::span<const AgentProfile> population,
                                             const CueBundle& bundle, Regime regime) {
  if (population.empty()) throw ValidationError("evaluate_test_email: empty population");
  TestEmailReport report;
  report.bundle = bundle;
  report.mode = TestEmailMode::Analytic;
  for (const auto& agent : population) {
    const SoMDistribution dist = som_distribution(bundle, agent, regime);
    report.mean_selection += dist.p;
    report.click_contribution += dist.p.cwiseProduct(agent.clickthrough);
  }
  report.mean_selection /= static_cast<double>(population.size());
  report.click_contribution /= static_cast<double>(population.size());
  report.overall_click_rate = report.click_contribution.sum();
  return report;
}

TestEmailReport evaluate_test_email_sampled(std::span<const AgentProfile> population,
                                            const CueBundle& bundle, Regime regime,
                                            std::uint64_t sends, std::uint64_t seed) {
  if (population.empty()) throw ValidationError("evaluate_test_email: empty population");
  if (sends < 1) throw ValidationError("evaluate_test_email: sends must be >= 1");
  TestEmailReport report;
  report.bundle = bundle;
  report.mode = TestEmailMode::Sampled;

  std::vector<SoMDistribution> dists;
  dists.reserve(population.size());
  for (const auto& agent : population) dists.push_back(som_distribution(bundle, agent, regime));

  SplitMix64 rng = SplitMix64::for_stream(seed, 0);
  Vector4d drawn = Vector4d::Zero();
  Vector4d clicked = Vector4d::Zero();
  for (std::uint64_t e = 0; e < sends; ++e) {
    const std::size_t i = static_cast<std::size_t>(e % population.size());
    const ChoiceCriterion c = sample_criterion(dists[i], rng);
    drawn[criterion_index(c)] += 1.0;
    if (resolve_clickthrough(c, population[i], rng)) clicked[criterion_index(c)] += 1.0;
  }
  report.mean_selection = drawn / static_cast<double>(sends);
  report.click_contribution = clicked / static_cast<double>(sends);
  report.overall_click_rate = report.click_contribution.sum();
  return report;
}

PolicyComparison policy_comparison(const ScenarioConfig& scenario,
                                   std::span<const TrainingIntervention> interventions,
                                   std::uint64_t replications, unsigned threads) {
  PolicyComparison table;
  const SimulationResult base = run_monte_carlo(scenario, replications, threads);
  table.rows.push_back({"base", base.aggregates.breach_probability,
                        base.aggregates.breach_probability_hw, 0.0});

  for (const auto& intervention : interventions) {
    ScenarioConfig treated = scenario;  // common master seed: coupled runs
    treated.agents = apply_training(scenario.agents, intervention);
    const SimulationResult run = run_monte_carlo(treated, replications, threads);

    std::ostringstream label;
    label << intervention_kind_name(intervention.kind) << "(" << intervention.magnitude << ")";
    table.rows.push_back({label.str(), run.aggregates.breach_probability,
                          run.aggregates.breach_probability_hw,
                          base.aggregates.breach_probability -
                              run.aggregates.breach_probability});
  }
  return table;
}

}  // namespace phishsim
