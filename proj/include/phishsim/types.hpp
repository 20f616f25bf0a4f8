#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phishsim {

using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXd;

/// Number of coexisting choice criteria. All shipped logic assumes four.
inline constexpr int kCriterionCount = 4;

/// The four ways an email recipient may decide about an incoming message.
/// The 1..4 ordering is fixed and used for inverse-CDF criterion sampling,
/// so replications reproduce bit-identically across platforms.
enum class ChoiceCriterion : int {
  Deliberative = 1,  // reasons about the email before acting
  Behavioral = 2,    // partly deliberative, heuristic-driven
  Impulsive = 3,     // visceral response, clicks through unconditionally
  Routine = 4,       // automatic workflow response, clicks through unconditionally
};

constexpr int criterion_index(ChoiceCriterion c) { return static_cast<int>(c) - 1; }

constexpr ChoiceCriterion criterion_from_index(int idx) {
  return static_cast<ChoiceCriterion>(idx + 1);
}

const char* criterion_name(ChoiceCriterion c);

/// Which norm bounds the attacker's cue-emphasis ball.
enum class Norm { L1, L2, LInf };

const char* norm_name(Norm n);

/// Whether the attacker designs emails with or without insider knowledge of
/// the organization. Insider knowledge switches agents to their posterior
/// susceptibility matrix (which may differ only in the Routine row).
enum class Regime { Prior, Posterior };

const char* regime_name(Regime r);

/// One email design: emphasis placed on each of A available persuasion cues.
/// Feasible bundles have every component in [0,1] and norm at most 1.
struct CueBundle {
  VectorXd emphasis;

  Eigen::Index dim() const { return emphasis.size(); }
};

using SusceptibilityMatrix = Eigen::Matrix<double, kCriterionCount, Eigen::Dynamic>;

/// One email recipient.
///
/// `susceptibility_prior` / `susceptibility_posterior` are 4xA matrices; row c
/// gives how strongly each cue pulls the agent toward criterion c, before and
/// after the attacker holds insider information. `baseline` is the agent's
/// cue-independent propensity toward each criterion (strictly positive, which
/// keeps match qualities positive and selection probabilities well defined).
/// `clickthrough` is the probability of clicking conditional on each
/// criterion; Impulsive and Routine click with certainty.
struct AgentProfile {
  SusceptibilityMatrix susceptibility_prior;
  SusceptibilityMatrix susceptibility_posterior;
  Vector4d baseline;
  Vector4d clickthrough;
  bool is_target = false;

  const SusceptibilityMatrix& susceptibility(Regime r) const {
    return r == Regime::Prior ? susceptibility_prior : susceptibility_posterior;
  }
};

/// Probability distribution over the four choice criteria for one agent and
/// one email. Components are non-negative and sum to one.
struct SoMDistribution {
  Vector4d p;
};

/// Recipient-side classification payoffs. An opened benign email is a true
/// negative, a quarantined malicious one a true positive, and so on. Used for
/// cumulative welfare reporting only; click behavior never depends on these.
struct PayoffMatrix {
  double b_tn = 1.0;
  double b_tp = 1.0;
  double c_fn = 1.0;
  double c_fp = 1.0;
};

/// Input/configuration problems: malformed documents, violated invariants,
/// dimension mismatches, guard refusals. CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values encountered during numeric work. CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// API misuse, e.g. stepping an already-breached campaign. CLI exit code 2.
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace phishsim
