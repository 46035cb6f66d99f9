#ifndef CDEC_IHDR_HPP_
#define CDEC_IHDR_HPP_

#include <optional>
#include <vector>

#include "cdec/credal.hpp"

namespace cdec {

enum class IhdrMethod { greedy, exact };

// An imprecise highest-density label region: every distribution in the
// credal set assigns the labels at least achieved_lower_prob >= 1 - gamma.
struct Ihdr {
  std::vector<int> labels;  // ascending, 0-based
  double achieved_lower_prob = 0.0;
  double gamma = 0.0;
  IhdrMethod method = IhdrMethod::greedy;

  int size() const { return static_cast<int>(labels.size()); }
};

enum class DecisionKind { predict, abstain_aleatoric, abstain_epistemic };

// Outcome of the credal decision rule: a region when the total-uncertainty
// slack test passes, otherwise an abstention tagged by the dominant
// uncertainty source.
struct Decision {
  DecisionKind kind = DecisionKind::predict;
  std::optional<Ihdr> region;  // present iff kind == predict
  UncertaintyDecomposition decomposition;
  double slack = 0.0;        // log2(k) - u[TU]; predict iff slack >= epsilon
  double au_tu_ratio = 1.0;  // AU / u[TU], defined as 1 when u[TU] = 0
  int m_extremes = 0;
};

struct CdecOptions {
  double dup_tol = 1e-9;
  double hull_tol = 1e-8;
  bool exact_ihdr = false;  // only honored for k <= 20
};

// Adds labels in decreasing order of singleton lower probability (ties
// ascending by index) until the set-level lower probability reaches
// 1 - gamma. Always covers; not certified minimal. gamma = 1 returns the
// single top label rather than the empty set.
Ihdr ihdr_greedy(const CredalSet &cs, double gamma);

// Minimum-cardinality region by exhaustive search over cardinalities;
// among covering sets of minimal size the one with the largest achieved
// lower probability wins, then the lexicographically smallest. Requires
// k <= 20.
Ihdr ihdr_exact(const CredalSet &cs, double gamma);

// Sum of singleton lower probabilities over the subset; a lower bound for
// lower_probability(cs, subset) by superadditivity.
double ihdr_lower_bound(const CredalSet &cs, const std::vector<int> &subset);

// The full credal decision rule: reduce, decompose, test the slack
// log2(k) - u[TU] against epsilon, and either emit a region or abstain.
Decision cdec_decide(const PredictiveEnsemble &ensemble, double gamma,
                     double epsilon, const CdecOptions &options = {});

// Labels attaining the maximal singleton lower probability. The whole
// argmax set is returned when ties occur.
std::vector<int> cdec_point_prediction(const CredalSet &cs);

}  // namespace cdec

#endif  // CDEC_IHDR_HPP_
