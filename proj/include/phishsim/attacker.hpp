#pragma once

#include "phishsim/model.hpp"
#include "phishsim/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <utility>

namespace phishsim {

/// The attacker's economics: value of a successful click on a target, and a
/// linear cost of producing an email (fixed cost plus per-cue marginal cost).
struct AttackerParams {
  double value_of_success = 1.0;
  double effort_base = 0.0;
  VectorXd effort_weights;
  Norm norm = Norm::L2;
};

enum class OptimizeMethod { GradientMultiStart, GridOracle };

struct OptimizationResult {
  CueBundle best_bundle;
  double best_value = 0.0;
  OptimizeMethod method = OptimizeMethod::GradientMultiStart;
  long evaluations = 0;
  bool converged = false;
};

struct OptimizeOptions {
  int starts = 16;
  int max_iters = 500;
  double tol = 1e-8;
};

/// Production cost of one email: effort_base + effort_weights . emphasis.
double effort(const CueBundle& bundle, const AttackerParams& params);

/// The attacker's net expected value of broadcasting `bundle`: summed over
/// target agents, the probability of entering each criterion times that
/// criterion's click-through probability times the value of success, minus
/// the production effort. Non-targets do not enter the sum.
double objective(const CueBundle& bundle, std::span<const AgentProfile> population,
                 const AttackerParams& params, Regime regime);

/// Analytic gradient of `objective` with respect to the cue emphases.
VectorXd objective_gradient(const CueBundle& bundle, std::span<const AgentProfile> population,
                            const AttackerParams& params, Regime regime);

/// Projected gradient ascent from quasi-random feasible starts. Projection
/// clips components to [0,1] and then rescales onto the norm ball when the
/// norm exceeds 1. Returns the best local optimum across starts.
OptimizationResult optimize_bundle(std::span<const AgentProfile> population,
                                   const AttackerParams& params, Regime regime,
                                   const OptimizeOptions& options = {});

/// Exhaustive evaluation of the objective on the feasible lattice
/// {0, step, 2*step, ..., 1}^A intersected with the norm ball. Independent
/// check for optimize_bundle; ties break to the lexicographically smallest
/// bundle. Refuses cue dimensions above 4.
OptimizationResult grid_oracle_optimize(std::span<const AgentProfile> population,
                                        const AttackerParams& params, Regime regime, double step);

/// Lattice argmax of the mean selection probability of criterion `c` over
/// target agents, with the attained mean. Same guards as the grid oracle.
std::pair<CueBundle, double> criterion_optimal_bundle(ChoiceCriterion c,
                                                      std::span<const AgentProfile> population,
                                                      Regime regime, double step,
                                                      Norm norm = Norm::L2);

/// Gradient-ascent counterpart of criterion_optimal_bundle: maximizes the
/// mean selection probability of `c` over targets without a lattice, so any
/// cue dimension is allowed. Used by the campaign engine to aim emails.
OptimizationResult optimize_criterion_bundle(ChoiceCriterion c,
                                             std::span<const AgentProfile> population,
                                             Regime regime, Norm norm = Norm::L2,
                                             const OptimizeOptions& options = {});

/// Targeting characteristics of one criterion under one regime: the bundle
/// that maximizes its mean selection probability over targets, the attained
/// probability, the effort of that bundle, and the net value of playing it.
struct CriterionStats {
  CueBundle bundle;
  double max_selection = 0.0;
  double effort = 0.0;
  double channel_value = 0.0;  // value-of-success * sum over targets of
                               // selection * clickthrough, minus effort
};

/// Pure-strategy dominance analysis across the four criteria.
///
/// * deliberative: Deliberative is dominated by Behavioral when its channel
///   value is strictly below Behavioral's (clicks through far too rarely).
/// * behavioral vs impulsive (prior regime): Behavioral is dominated when the
///   mean Behavioral click-through probability is strictly below the ratio of
///   the maximal Impulsive and Behavioral selection probabilities.
/// * routine vs impulsive (posterior regime): Routine dominates when its
///   relative effort is strictly below its relative selection probability.
///
/// Verdicts are nullopt ("indeterminate") when an operand's denominator is
/// zero; operands are always reported so verdicts can be recomputed.
struct DominanceReport {
  std::array<CriterionStats, kCriterionCount> prior;
  std::array<CriterionStats, kCriterionCount> posterior;

  std::optional<bool> deliberative_dominated;
  double deliberative_left = 0.0;   // Deliberative channel value (prior)
  double deliberative_right = 0.0;  // Behavioral channel value (prior)

  std::optional<bool> behavioral_dominated_by_impulsive;
  double behavioral_left = 0.0;   // mean target click-through given Behavioral
  double behavioral_right = 0.0;  // max Impulsive selection / max Behavioral selection (prior)

  std::optional<bool> routine_dominates_impulsive_posterior;
  double routine_left = 0.0;   // effort(Routine argmax) / effort(Impulsive argmax), posterior
  double routine_right = 0.0;  // max Routine selection / max Impulsive selection, posterior
};

DominanceReport dominance_report(std::span<const AgentProfile> population,
                                 const AttackerParams& params, double step);

/// Verdict primitives, exposed so reports can be cross-checked from their
/// own operands.
std::optional<bool> behavioral_dominance_verdict(double rho2, double max_sel_impulsive,
                                                 double max_sel_behavioral);
std::optional<bool> routine_dominance_verdict(double effort_routine, double effort_impulsive,
                                              double max_sel_routine, double max_sel_impulsive);
std::optional<bool> deliberative_dominance_verdict(double deliberative_value,
                                                   double behavioral_value);

/// True when verdicts stored in `report` match verdicts recomputed from the
/// report's own operands.
bool verdicts_consistent(const DominanceReport& report);

/// Harness for the mixed-strategy argument: the expected value of randomizing
/// over pure strategies never beats the best pure strategy, strictly so when
/// positive weight sits on a non-maximal value. Returns whether that holds
/// for the given values and weights.
bool mixture_dominance_check(std::span<const double> pure_values, std::span<const double> weights);

}  // namespace phishsim
