#include "cdec/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cdec {

LabelSet LabelSet::of_size(int k) {
  if (k < 2) throw DimensionError("label set needs k >= 2, got " + std::to_string(k));
  return LabelSet{k, {}};
}

LabelSet LabelSet::with_names(std::vector<std::string> names) {
  LabelSet set = of_size(static_cast<int>(names.size()));
  std::set<std::string> distinct(names.begin(), names.end());
  if (distinct.size() != names.size())
    throw Error("label names must be distinct");
  set.names = std::move(names);
  return set;
}

void PredictiveEnsemble::check() const {
  if (members.empty())
    throw DimensionMismatch("ensemble needs at least one member");
  const int dim = members.front().k();
  for (const auto &m : members) {
    if (m.k() != dim)
      throw DimensionMismatch("ensemble members disagree on k: " +
                              std::to_string(m.k()) + " vs " + std::to_string(dim));
  }
  if (!member_ids.empty() && member_ids.size() != members.size())
    throw DimensionMismatch("member_ids length does not match member count");
}

namespace {

// Nudges the largest entry until the left-to-right sum is exactly one.
// Converges in one or two passes; keeping the sum bit-exact makes
// revalidation a no-op, so validate_pmf is idempotent.
void pin_sum_to_one(std::vector<double> &p) {
  for (int pass = 0; pass < 8; ++pass) {
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (total == 1.0) return;
    auto it = std::max_element(p.begin(), p.end());
    *it += 1.0 - total;
  }
}

}  // namespace

CategoricalPmf validate_pmf(const std::vector<double> &raw, double tolerance) {
  if (tolerance <= 0) throw Error("tolerance must be positive");
  if (raw.size() < 2)
    throw DimensionError("pmf needs k >= 2 entries, got " +
                         std::to_string(raw.size()));

  double sum = 0.0;
  bool clamped = false;
  for (double v : raw) {
    if (!std::isfinite(v)) throw NonFinite("pmf entry is not finite");
    if (v < -tolerance)
      throw NotAPmf("negative entry " + std::to_string(v) +
                    " below -tolerance");
    sum += v;
    if (v < 0.0) clamped = true;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw NotAPmf("entries sum to " + std::to_string(sum) + ", expected 1");

  std::vector<double> p(raw);
  if (clamped)
    for (double &v : p) v = std::max(v, 0.0);

  // Already normalized to machine precision: renormalizing again would
  // only shuffle last bits, so return unchanged (this makes validation
  // idempotent).
  if (!clamped && std::abs(sum - 1.0) <= 1e-13)
    return CategoricalPmf(std::move(p));

  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double &v : p) v /= total;
  pin_sum_to_one(p);
  return CategoricalPmf(std::move(p));
}

CategoricalPmf posterior_predictive(const VirtualCounts &counts) {
  if (counts.counts.size() < 2)
    throw DimensionError("virtual counts need k >= 2 entries");
  std::vector<double> posterior(counts.counts.size());
  double total = 0.0;
  for (size_t j = 0; j < counts.counts.size(); ++j) {
    const double c = counts.counts[j];
    if (!std::isfinite(c)) throw NonFinite("virtual count is not finite");
    if (c < 0.0) throw Error("virtual count is negative");
    posterior[j] = 1.0 + c;
    total += 1.0 + c;
  }
  for (double &v : posterior) v /= total;
  return validate_pmf(posterior);
}

double entropy(const CategoricalPmf &p) {
  double h = 0.0;
  for (double v : p.probs())
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(0.0, h);
}

double measure_entropy(const std::vector<double> &weights) {
  double h = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw NonFinite("weight is not finite");
    if (w < 0.0) throw Error("weight is negative");
    if (w > 0.0) h -= w * std::log2(w);
  }
  return h;
}

double categorical_variance(const CategoricalPmf &p) {
  double mean = 0.0, second = 0.0;
  for (int j = 0; j < p.k(); ++j) {
    const double label = static_cast<double>(j + 1);
    mean += label * p[j];
    second += label * label * p[j];
  }
  return std::max(0.0, second - mean * mean);
}

CategoricalPmf uniform_pmf(int k) {
  if (k < 2) throw DimensionError("uniform pmf needs k >= 2");
  return validate_pmf(std::vector<double>(k, 1.0 / k));
}

CategoricalPmf mean_pmf(const PredictiveEnsemble &ensemble) {
  ensemble.check();
  std::vector<double> mean(ensemble.k(), 0.0);
  for (const auto &m : ensemble.members)
    for (int j = 0; j < m.k(); ++j) mean[j] += m[j];
  for (double &v : mean) v /= ensemble.size();
  return validate_pmf(mean);
}

}  // namespace cdec
