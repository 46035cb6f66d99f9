#ifndef CDEC_INTERVAL_HPP_
#define CDEC_INTERVAL_HPP_

#include <optional>
#include <vector>

#include "cdec/core.hpp"
#include "cdec/ihdr.hpp"

namespace cdec {

// Interval-of-measures model: all pmfs obtained by normalizing a measure
// pointwise between the base pmf and (1 + d) times it.
struct IntervalModel {
  CategoricalPmf base;
  double d = 0.0;  // inflation factor, >= 0
};

struct IntervalBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Lower/upper probability of the label subset under the interval model:
//   lower(A) = (1 + (1+d) L(A^c) / L(A))^-1,
//   upper(A) = (1 + L(A^c) / ((1+d) L(A)))^-1,
// with L the base mass. A nonempty subset with zero base mass gets the
// limiting value (0, 0); conjugacy is preserved through the complement.
IntervalBounds interval_lower_upper(const IntervalModel &model,
                                    const std::vector<int> &subset);

// Reduced miscoverage level gamma / (1 + (1-gamma) d). At most gamma,
// with equality iff d = 0 or gamma in {0, 1}.
double xi_of_d(double gamma, double d);

// Smallest prefix of labels, sorted by descending probability (ties
// ascending by index), whose cumulative mass reaches 1 - xi. At xi = 1
// the top label is returned rather than the empty set.
std::vector<int> precise_hdr(const CategoricalPmf &p, double xi);

// The HDR at level gamma, augmented by the next most probable label when
// its mass equals 1 - gamma exactly (tolerance 1e-12).
std::vector<int> augmented_region(const CategoricalPmf &p, double gamma);

struct OptimalInflation {
  double d_star = 0.0;
  double xi = 0.0;          // actual miscoverage of the augmented region
  std::vector<int> region;  // the augmented region the solve was based on
};

// Solves for the inflation factor that matches the augmented region's
// actual coverage: d* = (gamma - xi) / (xi (1 - gamma)). Throws
// DegenerateCoverage when the region carries all probability mass.
OptimalInflation optimal_d(const CategoricalPmf &p, double gamma);

// Variance-based decomposition: au = V[Y], tu = (1+d)^2 au, eu = tu - au.
struct IntervalDecomposition {
  double au = 0.0;
  double eu = 0.0;
  double tu = 0.0;
  double d_used = 0.0;
};

IntervalDecomposition variance_decomposition(const CategoricalPmf &p,
                                             double d);

struct IntervalDecision {
  DecisionKind kind = DecisionKind::predict;
  std::optional<Ihdr> region;  // present iff kind == predict
  IntervalDecomposition decomposition;
  double d_star = 0.0;
  double xi = 0.0;
  double slack = 0.0;  // V[(1+d*)Ymax] - V[(1+d*)Y]; predict iff >= epsilon
  bool d_star_infinite = false;
};

// The interval decision rule: solve for d*, compare the inflated variance
// against its uniform-pmf maximum, and either emit the level-xi HDR or
// abstain. Degenerate coverage routes to an epistemic abstention with the
// infinite-inflation flag set.
IntervalDecision idec_decide(const CategoricalPmf &p, double gamma,
                             double epsilon);

// Excess upper coverage of the interval model's region over 1 - gamma:
// gamma (1-gamma) d (2+d) / ((1-gamma)(1+d)^2 + gamma). Grows from 0 at
// d = 0 toward gamma as d grows.
double conservativeness(double gamma, double d);

}  // namespace cdec

#endif  // CDEC_INTERVAL_HPP_
