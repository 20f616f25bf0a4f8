#include "phishsim/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace phishsim {

namespace {

std::vector<const AgentProfile*> target_agents(std::span<const AgentProfile> population) {
  std::vector<const AgentProfile*> targets;
  for (const auto& agent : population) {
    if (agent.is_target) targets.push_back(&agent);
  }
  return targets;
}

void require_targets(const std::vector<const AgentProfile*>& targets) {
  if (targets.empty()) {
    throw ValidationError("objective undefined: population contains no target agents");
  }
}

void check_dimensions(std::span<const AgentProfile> population, Eigen::Index dim,
                      const AttackerParams& params) {
  if (params.effort_weights.size() != dim) {
    std::ostringstream msg;
    msg << "effort_weights has " << params.effort_weights.size() << " components, expected " << dim;
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (population[i].susceptibility_prior.cols() != dim ||
        population[i].susceptibility_posterior.cols() != dim) {
      std::ostringstream msg;
      msg << "agent " << i << " susceptibility has " << population[i].susceptibility_prior.cols()
          << " cue columns, expected " << dim;
      throw ValidationError(msg.str());
    }
  }
}

/// Maps an arbitrary point into the feasible set {x in [0,1]^A, norm(x) <= 1}.
///
/// Box clip is exact for the sup norm, and clip-then-radial-rescale works
/// well for the Euclidean ball. Radial rescaling onto the L1 face is a trap,
/// though: ascent iterates stall where the gradient is parallel to x instead
/// of at a maximizer, so the L1 case uses the exact water-filling projection
/// (x_i = clamp(y_i - tau, 0, 1) with tau chosen to land on the face).
void project_feasible(VectorXd& x, Norm norm) {
  x = x.cwiseMax(0.0).cwiseMin(1.0);
  if (norm == Norm::L1) {
    if (x.sum() <= 1.0) return;
    double lo = 0.0, hi = x.maxCoeff();
    for (int it = 0; it < 100; ++it) {
      const double tau = 0.5 * (lo + hi);
      const double total = (x.array() - tau).cwiseMax(0.0).cwiseMin(1.0).sum();
      (total > 1.0 ? lo : hi) = tau;
    }
    x = (x.array() - hi).cwiseMax(0.0).cwiseMin(1.0);
    return;
  }
  const double nv = norm_value(x, norm);
  if (nv > 1.0) x /= nv;
}

/// Additive quasi-random sequence (generalized golden ratio) covering the
/// unit box evenly; used for deterministic multi-start points.
VectorXd quasi_random_point(int dim, long index) {
  double g = 1.5;
  for (int it = 0; it < 64; ++it) {
    g = std::pow(1.0 + g, 1.0 / (dim + 1));
  }
  VectorXd x(dim);
  double inv = 1.0;
  for (int i = 0; i < dim; ++i) {
    inv /= g;
    double v = 0.5 + static_cast<double>(index) * inv;
    x[i] = v - std::floor(v);
  }
  return x;
}

struct AscentProblem {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
};

OptimizationResult projected_ascent(const AscentProblem& problem, Eigen::Index dim, Norm norm,
                                    const OptimizeOptions& options) {
  if (options.starts < 1 || options.max_iters < 1 || !(options.tol > 0.0)) {
    throw ValidationError("optimize options require starts >= 1, max_iters >= 1, tol > 0");
  }

  OptimizationResult best;
  best.method = OptimizeMethod::GradientMultiStart;
  best.best_value = -std::numeric_limits<double>::infinity();

  auto evaluate = [&](const VectorXd& x) {
    const double v = problem.value(x);
    ++best.evaluations;
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite objective at bundle [" << x.transpose() << "]";
      throw NumericalError(msg.str());
    }
    return v;
  };

  for (int s = 0; s < options.starts; ++s) {
    VectorXd x;
    if (s == 0) {
      x = VectorXd::Zero(dim);
    } else if (s == 1) {
      x = VectorXd::Constant(dim, 0.5);
    } else if (s - 2 < dim) {
      x = VectorXd::Unit(dim, s - 2);  // corner optima are common
    } else {
      x = quasi_random_point(static_cast<int>(dim), s - 1 - static_cast<int>(dim));
    }
    project_feasible(x, norm);
    double fx = evaluate(x);
    bool converged = false;

    for (int it = 0; it < options.max_iters; ++it) {
      const VectorXd g = problem.gradient(x);
      // Near the norm-ball boundary a full gradient step is mostly radial and
      // the projection cancels it, so take the best step over a geometric
      // ladder instead of the first improving one.
      VectorXd best_cand;
      double best_fc = fx;
      double eta = 1.0;
      for (int trial = 0; trial < 40; ++trial, eta *= 0.5) {
        VectorXd cand = x + eta * g;
        project_feasible(cand, norm);
        const double fc = evaluate(cand);
        if (fc > best_fc) {
          best_fc = fc;
          best_cand = std::move(cand);
        }
      }
      if (best_fc <= fx) {
        converged = true;  // no ascent step improves: stationary within resolution
        break;
      }
      const double change = best_fc - fx;
      x = std::move(best_cand);
      fx = best_fc;
      if (change < options.tol) {
        converged = true;
        break;
      }
    }

    if (fx > best.best_value) {
      best.best_value = fx;
      best.best_bundle = CueBundle{x};
      best.converged = converged;
    }
  }
  return best;
}

/// Axis values {0, step, 2*step, ..., 1}.
std::vector<double> lattice_axis(double step) {
  std::vector<double> axis;
  for (long j = 0;; ++j) {
    double v = static_cast<double>(j) * step;
    if (v > 1.0 + 1e-9) break;
    if (std::abs(v - 1.0) <= 1e-9) v = 1.0;
    axis.push_back(v);
    if (v == 1.0) break;
  }
  if (axis.back() != 1.0) axis.push_back(1.0);
  return axis;
}

/// All feasible lattice points in ascending lexicographic order, one per row.
MatrixXd feasible_lattice(int dim, double step, Norm norm) {
  const auto axis = lattice_axis(step);
  std::vector<double> rows;
  std::vector<std::size_t> odo(dim, 0);
  VectorXd point(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) point[i] = axis[odo[i]];
    if (norm_value(point, norm) <= 1.0 + 1e-12) {
      rows.insert(rows.end(), point.data(), point.data() + dim);
    }
    int pos = dim - 1;
    while (pos >= 0 && ++odo[pos] == axis.size()) {
      odo[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  const Eigen::Index count = static_cast<Eigen::Index>(rows.size()) / dim;
  MatrixXd lattice(count, dim);
  for (Eigen::Index r = 0; r < count; ++r) {
    for (int c = 0; c < dim; ++c) lattice(r, c) = rows[static_cast<std::size_t>(r) * dim + c];
  }
  return lattice;
}

void check_grid_preconditions(Eigen::Index dim, double step) {
  if (dim > 4) {
    std::ostringstream msg;
    msg << "grid oracle refused: cue dimension " << dim << " exceeds the A <= 4 guard";
    throw ValidationError(msg.str());
  }
  if (!(step > 0.0) || step > 1.0) {
    throw ValidationError("grid oracle requires step in (0, 1]");
  }
}

/// Net objective value at every lattice row.
VectorXd lattice_objective(const MatrixXd& lattice,
                           const std::vector<const AgentProfile*>& targets,
                           const AttackerParams& params, Regime regime) {
  VectorXd vals = VectorXd::Zero(lattice.rows());
  for (const auto* agent : targets) {
    MatrixXd quality = lattice * agent->susceptibility(regime).transpose();
    quality.rowwise() += agent->baseline.transpose();
    const VectorXd numer = quality * agent->clickthrough;
    const VectorXd denom = quality.rowwise().sum();
    vals.array() += numer.array() / denom.array();
  }
  vals *= params.value_of_success;
  vals.array() -= (lattice * params.effort_weights).array() + params.effort_base;
  return vals;
}

/// Mean selection probability of criterion `c` over targets, per lattice row.
VectorXd lattice_criterion_mean(const MatrixXd& lattice,
                                const std::vector<const AgentProfile*>& targets,
                                ChoiceCriterion c, Regime regime) {
  VectorXd vals = VectorXd::Zero(lattice.rows());
  for (const auto* agent : targets) {
    MatrixXd quality = lattice * agent->susceptibility(regime).transpose();
    quality.rowwise() += agent->baseline.transpose();
    const VectorXd denom = quality.rowwise().sum();
    vals.array() += quality.col(criterion_index(c)).array() / denom.array();
  }
  return vals / static_cast<double>(targets.size());
}

Eigen::Index strict_argmax(const VectorXd& vals) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i) {
    if (vals[i] > vals[best]) best = i;
  }
  return best;
}

}  // namespace

double effort(const CueBundle& bundle, const AttackerParams& params) {
  if (params.effort_weights.size() != bundle.dim()) {
    std::ostringstream msg;
    msg << "effort: bundle has " << bundle.dim() << " components but effort_weights has "
        << params.effort_weights.size();
    throw ValidationError(msg.str());
  }
  return params.effort_base + params.effort_weights.dot(bundle.emphasis);
}

double objective(const CueBundle& bundle, std::span<const AgentProfile> population,
                 const AttackerParams& params, Regime regime) {
  const auto targets = target_agents(population);
  require_targets(targets);
  double gross = 0.0;
  for (const auto* agent : targets) {
    const SoMDistribution dist = som_distribution(bundle, *agent, regime);
    gross += dist.p.dot(agent->clickthrough);
  }
  return params.value_of_success * gross - effort(bundle, params);
}

VectorXd objective_gradient(const CueBundle& bundle, std::span<const AgentProfile> population,
                            const AttackerParams& params, Regime regime) {
  const auto targets = target_agents(population);
  require_targets(targets);
  VectorXd grad = VectorXd::Zero(bundle.dim());
  for (const auto* agent : targets) {
    const auto& s = agent->susceptibility(regime);
    const Vector4d quality = agent->baseline + s * bundle.emphasis;
    const double total = quality.sum();
    const VectorXd column_sum = s.colwise().sum().transpose();
    const double clicks = agent->clickthrough.dot(quality);
    grad += (s.transpose() * agent->clickthrough * total - clicks * column_sum) / (total * total);
  }
  return params.value_of_success * grad - params.effort_weights;
}

OptimizationResult optimize_bundle(std::span<const AgentProfile> population,
                                   const AttackerParams& params, Regime regime,
                                   const OptimizeOptions& options) {
  const auto targets = target_agents(population);
  require_targets(targets);
  if (population.empty()) throw ValidationError("optimize_bundle: empty population");
  const Eigen::Index dim = population[0].susceptibility_prior.cols();
  check_dimensions(population, dim, params);

  AscentProblem problem{
      [&](const VectorXd& x) { return objective(CueBundle{x}, population, params, regime); },
      [&](const VectorXd& x) {
        return objective_gradient(CueBundle{x}, population, params, regime);
      }};
  return projected_ascent(problem, dim, params.norm, options);
}

OptimizationResult grid_oracle_optimize(std::span<const AgentProfile> population,
                                        const AttackerParams& params, Regime regime, double step) {
  const auto targets = target_agents(population);
  require_targets(targets);
  const Eigen::Index dim = population[0].susceptibility_prior.cols();
  check_dimensions(population, dim, params);
  check_grid_preconditions(dim, step);

  const MatrixXd lattice = feasible_lattice(static_cast<int>(dim), step, params.norm);
  const VectorXd vals = lattice_objective(lattice, targets, params, regime);
  const Eigen::Index at = strict_argmax(vals);

  OptimizationResult result;
  result.method = OptimizeMethod::GridOracle;
  result.best_bundle = CueBundle{lattice.row(at).transpose()};
  result.best_value = vals[at];
  result.evaluations = lattice.rows();
  result.converged = true;
  return result;
}

std::pair<CueBundle, double> criterion_optimal_bundle(ChoiceCriterion c,
                                                      std::span<const AgentProfile> population,
                                                      Regime regime, double step, Norm norm) {
  const auto targets = target_agents(population);
  require_targets(targets);
  const Eigen::Index dim = population[0].susceptibility_prior.cols();
  check_grid_preconditions(dim, step);

  const MatrixXd lattice = feasible_lattice(static_cast<int>(dim), step, norm);
  const VectorXd vals = lattice_criterion_mean(lattice, targets, c, regime);
  const Eigen::Index at = strict_argmax(vals);
  return {CueBundle{lattice.row(at).transpose()}, vals[at]};
}

OptimizationResult optimize_criterion_bundle(ChoiceCriterion c,
                                             std::span<const AgentProfile> population,
                                             Regime regime, Norm norm,
                                             const OptimizeOptions& options) {
  const auto targets = target_agents(population);
  require_targets(targets);
  const Eigen::Index dim = population[0].susceptibility_prior.cols();

  auto mean_selection = [&, targets](const VectorXd& x) {
    double acc = 0.0;
    for (const auto* agent : targets) {
      acc += som_distribution(CueBundle{x}, *agent, regime).p[criterion_index(c)];
    }
    return acc / static_cast<double>(targets.size());
  };
  auto mean_selection_grad = [&, targets](const VectorXd& x) {
    VectorXd grad = VectorXd::Zero(dim);
    for (const auto* agent : targets) {
      const auto& s = agent->susceptibility(regime);
      const Vector4d quality = agent->baseline + s * x;
      const double total = quality.sum();
      const VectorXd column_sum = s.colwise().sum().transpose();
      grad += (s.row(criterion_index(c)).transpose() * total -
               quality[criterion_index(c)] * column_sum) /
              (total * total);
    }
    return VectorXd(grad / static_cast<double>(targets.size()));
  };

  return projected_ascent(AscentProblem{mean_selection, mean_selection_grad}, dim, norm, options);
}

std::optional<bool> behavioral_dominance_verdict(double rho2, double max_sel_impulsive,
                                                 double max_sel_behavioral) {
  const double right = max_sel_impulsive / max_sel_behavioral;
  if (!std::isfinite(rho2) || !std::isfinite(right)) return std::nullopt;
  return rho2 < right;
}

std::optional<bool> routine_dominance_verdict(double effort_routine, double effort_impulsive,
                                              double max_sel_routine, double max_sel_impulsive) {
  const double left = effort_routine / effort_impulsive;
  const double right = max_sel_routine / max_sel_impulsive;
  if (!std::isfinite(left) || !std::isfinite(right)) return std::nullopt;
  return left < right;
}

std::optional<bool> deliberative_dominance_verdict(double deliberative_value,
                                                   double behavioral_value) {
  if (!std::isfinite(deliberative_value) || !std::isfinite(behavioral_value)) return std::nullopt;
  return deliberative_value < behavioral_value;
}

DominanceReport dominance_report(std::span<const AgentProfile> population,
                                 const AttackerParams& params, double step) {
  const auto targets = target_agents(population);
  require_targets(targets);
  const Eigen::Index dim = population[0].susceptibility_prior.cols();
  check_dimensions(population, dim, params);
  check_grid_preconditions(dim, step);

  const MatrixXd lattice = feasible_lattice(static_cast<int>(dim), step, params.norm);

  DominanceReport report;
  for (Regime regime : {Regime::Prior, Regime::Posterior}) {
    auto& stats = regime == Regime::Prior ? report.prior : report.posterior;
    for (int idx = 0; idx < kCriterionCount; ++idx) {
      const auto c = criterion_from_index(idx);
      const VectorXd vals = lattice_criterion_mean(lattice, targets, c, regime);
      const Eigen::Index at = strict_argmax(vals);
      CriterionStats& entry = stats[idx];
      entry.bundle = CueBundle{lattice.row(at).transpose()};
      entry.max_selection = vals[at];
      entry.effort = effort(entry.bundle, params);
      double gross = 0.0;
      for (const auto* agent : targets) {
        const SoMDistribution dist = som_distribution(entry.bundle, *agent, regime);
        gross += dist.p[idx] * agent->clickthrough[idx];
      }
      entry.channel_value = params.value_of_success * gross - entry.effort;
    }
  }

  double rho2 = 0.0;
  for (const auto* agent : targets) {
    rho2 += agent->clickthrough[criterion_index(ChoiceCriterion::Behavioral)];
  }
  rho2 /= static_cast<double>(targets.size());

  const int deliberative = criterion_index(ChoiceCriterion::Deliberative);
  const int behavioral = criterion_index(ChoiceCriterion::Behavioral);
  const int impulsive = criterion_index(ChoiceCriterion::Impulsive);
  const int routine = criterion_index(ChoiceCriterion::Routine);

  report.deliberative_left = report.prior[deliberative].channel_value;
  report.deliberative_right = report.prior[behavioral].channel_value;
  report.deliberative_dominated =
      deliberative_dominance_verdict(report.deliberative_left, report.deliberative_right);

  report.behavioral_left = rho2;
  report.behavioral_right =
      report.prior[impulsive].max_selection / report.prior[behavioral].max_selection;
  report.behavioral_dominated_by_impulsive = behavioral_dominance_verdict(
      rho2, report.prior[impulsive].max_selection, report.prior[behavioral].max_selection);

  report.routine_left = report.posterior[routine].effort / report.posterior[impulsive].effort;
  report.routine_right =
      report.posterior[routine].max_selection / report.posterior[impulsive].max_selection;
  report.routine_dominates_impulsive_posterior = routine_dominance_verdict(
      report.posterior[routine].effort, report.posterior[impulsive].effort,
      report.posterior[routine].max_selection, report.posterior[impulsive].max_selection);

  return report;
}

bool verdicts_consistent(const DominanceReport& report) {
  const auto finite_less = [](double left, double right) -> std::optional<bool> {
    if (!std::isfinite(left) || !std::isfinite(right)) return std::nullopt;
    return left < right;
  };
  return finite_less(report.deliberative_left, report.deliberative_right) ==
             report.deliberative_dominated &&
         finite_less(report.behavioral_left, report.behavioral_right) ==
             report.behavioral_dominated_by_impulsive &&
         finite_less(report.routine_left, report.routine_right) ==
             report.routine_dominates_impulsive_posterior;
}

bool mixture_dominance_check(std::span<const double> pure_values,
                             std::span<const double> weights) {
  if (pure_values.empty() || pure_values.size() != weights.size()) {
    throw ValidationError("mixture_dominance_check: values and weights must be non-empty and equal length");
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("mixture_dominance_check: weights must be non-negative");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ValidationError("mixture_dominance_check: weights must sum to 1");
  }

  const double best = *std::max_element(pure_values.begin(), pure_values.end());
  double mixed = 0.0;
  bool mass_on_nonmax = false;
  for (std::size_t i = 0; i < pure_values.size(); ++i) {
    mixed += weights[i] * pure_values[i];
    if (weights[i] > 0.0 && pure_values[i] < best) mass_on_nonmax = true;
  }
  return mass_on_nonmax ? mixed < best : mixed <= best;
}

}  // namespace phishsim
