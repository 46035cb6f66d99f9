#ifndef CDEC_CORE_HPP_
#define CDEC_CORE_HPP_

#include <string>
#include <vector>

#include "cdec/errors.hpp"

namespace cdec {

// The set of class labels. Internally labels are 0-based indices 0..k-1;
// the variance operator and the on-disk format read them as 1..k.
struct LabelSet {
  int k = 0;
  std::vector<std::string> names;  // empty, or exactly k distinct entries

  static LabelSet of_size(int k);
  static LabelSet with_names(std::vector<std::string> names);
};

// A probability vector over k >= 2 labels. Entries are nonnegative and sum
// to one; instances are built through validate_pmf, which renormalizes.
class CategoricalPmf {
 public:
  CategoricalPmf() = default;

  int k() const { return static_cast<int>(probs_.size()); }
  double operator[](int j) const { return probs_[static_cast<size_t>(j)]; }
  const std::vector<double> &probs() const { return probs_; }

  bool operator==(const CategoricalPmf &other) const = default;

 private:
  explicit CategoricalPmf(std::vector<double> probs)
      : probs_(std::move(probs)) {}
  friend CategoricalPmf validate_pmf(const std::vector<double> &, double);

  std::vector<double> probs_;
};

// Per-class virtual observation counts. Entries are nonnegative reals and
// need not be integral.
struct VirtualCounts {
  std::vector<double> counts;
};

// S predictive pmfs over a common label set.
struct PredictiveEnsemble {
  std::vector<CategoricalPmf> members;
  std::vector<std::string> member_ids;  // optional; same length when present

  int size() const { return static_cast<int>(members.size()); }
  int k() const { return members.empty() ? 0 : members.front().k(); }

  // Throws DimensionMismatch unless S >= 1 and all members share k.
  void check() const;
};

// Validates and renormalizes a raw probability vector. Entries in
// [-tolerance, 0) are clamped to zero before renormalizing. Validating an
// already valid pmf returns it unchanged.
CategoricalPmf validate_pmf(const std::vector<double> &raw,
                            double tolerance = 1e-9);

// Posterior predictive parameter from virtual counts:
// out_j = (1 + counts_j) / sum_l (1 + counts_l).
CategoricalPmf posterior_predictive(const VirtualCounts &counts);

// Shannon entropy in bits, with the 0*log2(0) = 0 convention.
double entropy(const CategoricalPmf &p);

// -sum_j w_j log2(w_j) for an arbitrary nonnegative weight vector. The
// weights need not sum to one, so the result may be negative.
double measure_entropy(const std::vector<double> &weights);

// Variance of the label read as an integer 1..k:
// sum_j j^2 p_j - (sum_j j p_j)^2.
double categorical_variance(const CategoricalPmf &p);

CategoricalPmf uniform_pmf(int k);

// Uniform mixture of the ensemble members.
CategoricalPmf mean_pmf(const PredictiveEnsemble &ensemble);

}  // namespace cdec

#endif  // CDEC_CORE_HPP_
