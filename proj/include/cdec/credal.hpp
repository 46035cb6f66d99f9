#ifndef CDEC_CREDAL_HPP_
#define CDEC_CREDAL_HPP_

#include <optional>
#include <vector>

#include "cdec/core.hpp"

namespace cdec {

// Certificate that a discarded ensemble member is a convex combination of
// the retained extreme points.
struct DiscardCertificate {
  int member_index;                  // index into the source ensemble
  std::vector<double> coefficients;  // convex weights over the extremes
  double max_abs_error;
};

// The extreme points of a finitely generated credal set, as produced by
// reduce_to_extremes. Extremes are listed in ascending source order.
struct CredalSet {
  std::vector<CategoricalPmf> extremes;
  std::vector<int> source_indices;
  std::vector<DiscardCertificate> discards;

  int size() const { return static_cast<int>(extremes.size()); }
  int k() const { return extremes.empty() ? 0 : extremes.front().k(); }

  // Wraps pre-reduced extreme points without running the reduction.
  static CredalSet from_extremes(std::vector<CategoricalPmf> extremes);
};

// Entropy-based uncertainty decomposition of a credal set. All values are
// in bits. The chain
//   au <= tu_lower <= tu_exact <= tu_upper_tight <= tu_upper_loose
// holds whenever tu_exact is present.
struct UncertaintyDecomposition {
  double au = 0.0;              // min entropy over the extremes
  double tu_lower = 0.0;        // max entropy over the extremes
  double tu_upper_tight = 0.0;  // log2 sum_s 2^{h_s}
  double tu_upper_loose = 0.0;  // max_s h_s + log2 M
  std::optional<double> tu_exact;
  double eu_lower = 0.0;        // max(0, tu_lower - au)
  double eu_upper = 0.0;        // tu_upper_loose - au

  enum class Measure { entropy, hartley };
  Measure measure = Measure::entropy;
};

// Keeps the ensemble members that are vertices of the convex hull of
// {pi'_s} in the simplex. Members whose pairwise max-abs distance is at
// most dup_tol collapse onto the lowest index. Every discarded member is
// certified as a convex combination of the retained ones with max-abs
// reconstruction error at most hull_tol.
CredalSet reduce_to_extremes(const PredictiveEnsemble &ensemble,
                             double dup_tol = 1e-9, double hull_tol = 1e-8);

// min / max over the extremes of the probability of the given label set.
// Labels are 0-based. upper_probability is evaluated through the conjugate
// identity upper(A) = 1 - lower(A^c), which therefore holds bit-exactly.
double lower_probability(const CredalSet &cs, const std::vector<int> &subset);
double upper_probability(const CredalSet &cs, const std::vector<int> &subset);

// Aleatoric/total/epistemic decomposition from the extreme entropies.
// With exact = true the upper entropy is additionally maximized
// numerically and reported as tu_exact.
UncertaintyDecomposition entropy_decomposition(const CredalSet &cs,
                                               bool exact = false);

// sup over mixtures beta of H(sum_s beta_s P_s), solved by Frank-Wolfe
// with away steps over the simplex; the duality gap certifies that the
// returned value is within tol of the supremum. Throws ConvergenceFailure
// if the gap still exceeds tol after max_iters iterations.
double exact_upper_entropy(const CredalSet &cs, double tol = 1e-6,
                           int max_iters = 10000);

// Generalized Hartley measure: the Moebius transform of the lower
// probability weighted by log2 of the subset cardinality. Enumerates the
// power set, so it refuses k > 12.
double generalized_hartley(const CredalSet &cs);

namespace detail {

// Least-squares fit of target as a convex combination of basis points.
struct SimplexFit {
  std::vector<double> coefficients;  // nonnegative, sum to one
  double max_abs_error;
};

SimplexFit fit_convex_combination(
    const std::vector<const CategoricalPmf *> &basis,
    const CategoricalPmf &target);

}  // namespace detail

}  // namespace cdec

#endif  // CDEC_CREDAL_HPP_
