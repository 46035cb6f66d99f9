#ifndef CDEC_TESTS_ORACLES_HPP_
#define CDEC_TESTS_ORACLES_HPP_

// Reference implementations used only by the tests. Each one follows the
// defining formula literally and stays independent of the library code
// paths it is used to check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cdec/sampling.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double entropy_bits(const std::vector<double> &p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

inline double variance(const std::vector<double> &p) {
  double mean = 0.0, second = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    mean += (j + 1.0) * p[j];
    second += (j + 1.0) * (j + 1.0) * p[j];
  }
  return second - mean * mean;
}

inline double subset_sum(const std::vector<double> &p,
                         const std::vector<int> &subset) {
  double s = 0.0;
  for (int y : subset) s += p[y];
  return s;
}

inline double lower_prob(const Matrix &extremes,
                         const std::vector<int> &subset) {
  double lo = 2.0;
  for (const auto &p : extremes) lo = std::min(lo, subset_sum(p, subset));
  return lo;
}

inline std::vector<int> mask_to_labels(std::uint32_t mask, int k) {
  std::vector<int> labels;
  for (int j = 0; j < k; ++j)
    if (mask >> j & 1u) labels.push_back(j);
  return labels;
}

// Exhaustive maximization of the mixture entropy over a simplex grid with
// the given number of steps per coordinate. Supports M <= 3.
inline double grid_upper_entropy(const Matrix &extremes, int steps) {
  const size_t m = extremes.size();
  const size_t k = extremes.front().size();
  std::vector<double> q(k);
  const auto mix_entropy = [&](double b1, double b2, double b3) {
    for (size_t j = 0; j < k; ++j) {
      q[j] = b1 * extremes[0][j];
      if (m > 1) q[j] += b2 * extremes[1][j];
      if (m > 2) q[j] += b3 * extremes[2][j];
    }
    return entropy_bits(q);
  };
  double best = -1.0;
  if (m == 1) return mix_entropy(1.0, 0.0, 0.0);
  if (m == 2) {
    for (int i = 0; i <= steps; ++i) {
      const double b = static_cast<double>(i) / steps;
      best = std::max(best, mix_entropy(b, 1.0 - b, 0.0));
    }
    return best;
  }
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps - i; ++j) {
      const double b1 = static_cast<double>(i) / steps;
      const double b2 = static_cast<double>(j) / steps;
      best = std::max(best, mix_entropy(b1, b2, 1.0 - b1 - b2));
    }
  return best;
}

// Literal double sum of the generalized Hartley measure over the power
// set, with the Moebius term expanded as written.
inline double hartley_double_sum(const Matrix &extremes) {
  const int k = static_cast<int>(extremes.front().size());
  const std::uint32_t n_masks = 1u << k;
  double total = 0.0;
  for (std::uint32_t a = 1; a < n_masks; ++a) {
    const int size_a = std::popcount(a);
    if (size_a < 2) continue;  // log2(1) = 0
    double moebius = 0.0;
    for (std::uint32_t b = a;; b = (b - 1) & a) {
      const int diff = std::popcount(a) - std::popcount(b);
      const double sign = diff % 2 == 0 ? 1.0 : -1.0;
      moebius += sign * lower_prob(extremes, mask_to_labels(b, k));
      if (b == 0) break;
    }
    total += std::log2(static_cast<double>(size_a)) * moebius;
  }
  return total;
}

// Brute-force minimum-cardinality covering region over all label subsets,
// with the library's tie rules: max achieved lower probability first,
// lexicographically smallest index list second.
inline std::vector<int> min_ihdr(const Matrix &extremes, double gamma) {
  const int k = static_cast<int>(extremes.front().size());
  const double threshold = 1.0 - gamma;
  std::vector<int> best;
  double best_achieved = -1.0;
  int best_size = k + 1;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    const auto labels = mask_to_labels(mask, k);
    const int size = static_cast<int>(labels.size());
    if (size > best_size) continue;
    const double achieved = lower_prob(extremes, labels);
    if (achieved < threshold) continue;
    const bool better =
        size < best_size ||
        (size == best_size &&
         (achieved > best_achieved ||
          (achieved == best_achieved && labels < best)));
    if (better) {
      best = labels;
      best_achieved = achieved;
      best_size = size;
    }
  }
  return best;
}

// AUROC by counting concordant pairs directly, ties at half credit.
inline double pair_auroc(const std::vector<double> &id_scores,
                         const std::vector<double> &ood_scores) {
  double credit = 0.0;
  for (double o : ood_scores)
    for (double i : id_scores) {
      if (o > i)
        credit += 1.0;
      else if (o == i)
        credit += 0.5;
    }
  return credit / (static_cast<double>(id_scores.size()) *
                   static_cast<double>(ood_scores.size()));
}

// Is p on the segment between a and b, to within tol in every coordinate?
inline bool on_segment(const std::vector<double> &a,
                       const std::vector<double> &b,
                       const std::vector<double> &p, double tol) {
  // Solve for the mixing weight on the coordinate with the widest span,
  // then check every other coordinate against it.
  size_t pivot = 0;
  for (size_t j = 1; j < a.size(); ++j)
    if (std::abs(a[j] - b[j]) > std::abs(a[pivot] - b[pivot])) pivot = j;
  const double span = a[pivot] - b[pivot];
  if (std::abs(span) < tol)
    return std::equal(a.begin(), a.end(), p.begin(),
                      [&](double x, double y) { return std::abs(x - y) <= tol; });
  const double t = (p[pivot] - b[pivot]) / span;
  if (t < -tol || t > 1.0 + tol) return false;
  for (size_t j = 0; j < a.size(); ++j)
    if (std::abs(t * a[j] + (1.0 - t) * b[j] - p[j]) > tol) return false;
  return true;
}

// Random pmf with Dirichlet(1) distribution, via the portable sampler.
inline std::vector<double> random_pmf(cdec::Sampler &sampler, int k) {
  return sampler.dirichlet(std::vector<double>(k, 1.0));
}

}  // namespace oracle

#endif  // CDEC_TESTS_ORACLES_HPP_
