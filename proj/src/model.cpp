#include "phishsim/model.hpp"

#include <cmath>
#include <sstream>

namespace phishsim {

const char* criterion_name(ChoiceCriterion c) {
  switch (c) {
    case ChoiceCriterion::Deliberative: return "deliberative";
    case ChoiceCriterion::Behavioral: return "behavioral";
    case ChoiceCriterion::Impulsive: return "impulsive";
    case ChoiceCriterion::Routine: return "routine";
  }
  return "?";
}

const char* norm_name(Norm n) {
  switch (n) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::LInf: return "linf";
  }
  return "?";
}

const char* regime_name(Regime r) { return r == Regime::Prior ? "prior" : "posterior"; }

double norm_value(const VectorXd& v, Norm norm) {
  switch (norm) {
    case Norm::L1: return v.lpNorm<1>();
    case Norm::L2: return v.norm();
    case Norm::LInf: return v.lpNorm<Eigen::Infinity>();
  }
  return v.norm();
}

double match_quality(const CueBundle& bundle, const AgentProfile& agent, ChoiceCriterion c,
                     Regime regime) {
  const auto& s = agent.susceptibility(regime);
  if (s.cols() != bundle.dim()) {
    std::ostringstream msg;
    msg << "match_quality: cue bundle has " << bundle.dim() << " components but susceptibility has "
        << s.cols();
    throw ValidationError(msg.str());
  }
  return agent.baseline[criterion_index(c)] + s.row(criterion_index(c)).dot(bundle.emphasis);
}

SoMDistribution som_distribution(const CueBundle& bundle, const AgentProfile& agent,
                                 Regime regime) {
  const auto& s = agent.susceptibility(regime);
  if (s.cols() != bundle.dim()) {
    std::ostringstream msg;
    msg << "som_distribution: cue bundle has " << bundle.dim()
        << " components but susceptibility has " << s.cols();
    throw ValidationError(msg.str());
  }
  Vector4d quality = agent.baseline + s * bundle.emphasis;
  return SoMDistribution{quality / quality.sum()};
}

ChoiceCriterion sample_criterion(const SoMDistribution& dist, SplitMix64& rng) {
  const double u = rng.next_unit();
  double cum = 0.0;
  for (int idx = 0; idx < kCriterionCount - 1; ++idx) {
    cum += dist.p[idx];
    if (u < cum) return criterion_from_index(idx);
  }
  return ChoiceCriterion::Routine;
}

bool resolve_clickthrough(ChoiceCriterion c, const AgentProfile& agent, SplitMix64& rng) {
  if (c == ChoiceCriterion::Impulsive || c == ChoiceCriterion::Routine) return true;
  return rng.next_unit() < agent.clickthrough[criterion_index(c)];
}

BundleValidation validate_cue_bundle(const CueBundle& bundle, Norm norm) {
  BundleValidation report;
  for (Eigen::Index a = 0; a < bundle.dim(); ++a) {
    const double x = bundle.emphasis[a];
    if (!(x >= 0.0 && x <= 1.0)) {
      std::ostringstream msg;
      msg << "component " << a << " = " << x << " outside [0,1]";
      report.issues.push_back(msg.str());
    }
  }
  const double nv = norm_value(bundle.emphasis, norm);
  if (!(nv <= 1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << norm_name(norm) << " norm " << nv << " exceeds 1";
    report.issues.push_back(msg.str());
  }
  report.ok = report.issues.empty();
  return report;
}

}  // namespace phishsim
