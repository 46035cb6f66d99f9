#include "cdec/ihdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cdec {

namespace {

std::vector<double> singleton_lowers(const CredalSet &cs) {
  std::vector<double> lows(cs.k(), std::numeric_limits<double>::infinity());
  for (const auto &p : cs.extremes)
    for (int j = 0; j < cs.k(); ++j) lows[j] = std::min(lows[j], p[j]);
  return lows;
}

// Label order for the greedy construction: decreasing singleton lower
// probability, ties ascending by index.
std::vector<int> greedy_order(const std::vector<double> &lows) {
  std::vector<int> order(lows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lows[a] > lows[b]; });
  return order;
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw Error("gamma must lie in [0, 1]");
}

}  // namespace

Ihdr ihdr_greedy(const CredalSet &cs, double gamma) {
  check_gamma(gamma);
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  const double threshold = 1.0 - gamma;
  const auto order = greedy_order(singleton_lowers(cs));

  std::vector<int> labels;
  double achieved = 0.0;
  for (int y : order) {
    labels.push_back(y);
    achieved = lower_probability(cs, labels);
    if (achieved >= threshold) break;
  }
  std::sort(labels.begin(), labels.end());
  return Ihdr{std::move(labels), achieved, gamma, IhdrMethod::greedy};
}

Ihdr ihdr_exact(const CredalSet &cs, double gamma) {
  check_gamma(gamma);
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  const int k = cs.k();
  if (k > 20)
    throw TooManyClasses("exact IHDR enumerates subsets; k = " +
                         std::to_string(k) + " > 20");
  const double threshold = 1.0 - gamma;

  // A cardinality c is impossible when even the c largest singleton upper
  // probabilities cannot add up to the threshold (subadditivity).
  std::vector<double> uppers(k, 0.0);
  for (const auto &p : cs.extremes)
    for (int j = 0; j < k; ++j) uppers[j] = std::max(uppers[j], p[j]);
  std::sort(uppers.begin(), uppers.end(), std::greater<>());

  double upper_sum = 0.0;
  int c_start = k;
  for (int c = 1; c <= k; ++c) {
    upper_sum += uppers[c - 1];
    if (upper_sum >= threshold) {
      c_start = c;
      break;
    }
  }

  std::vector<int> combo;
  for (int c = c_start; c <= k; ++c) {
    std::vector<int> best;
    double best_achieved = -1.0;

    combo.resize(c);
    std::iota(combo.begin(), combo.end(), 0);
    for (;;) {
      const double achieved = lower_probability(cs, combo);
      if (achieved >= threshold && achieved > best_achieved) {
        best_achieved = achieved;  // lex order: first seen wins ties
        best = combo;
      }
      // Advance to the next combination in lexicographic order.
      int i = c - 1;
      while (i >= 0 && combo[i] == k - c + i) --i;
      if (i < 0) break;
      ++combo[i];
      for (int j = i + 1; j < c; ++j) combo[j] = combo[j - 1] + 1;
    }
    if (!best.empty())
      return Ihdr{std::move(best), best_achieved, gamma, IhdrMethod::exact};
  }
  // The full label set always covers.
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  return Ihdr{std::move(all), 1.0, gamma, IhdrMethod::exact};
}

double ihdr_lower_bound(const CredalSet &cs, const std::vector<int> &subset) {
  const auto lows = singleton_lowers(cs);
  std::vector<int> sorted(subset);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  double bound = 0.0;
  for (int y : sorted) {
    if (y < 0 || y >= cs.k())
      throw LabelOutOfRange("label " + std::to_string(y) + " outside 0.." +
                            std::to_string(cs.k() - 1));
    bound += lows[y];
  }
  return bound;
}

Decision cdec_decide(const PredictiveEnsemble &ensemble, double gamma,
                     double epsilon, const CdecOptions &options) {
  check_gamma(gamma);
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");

  const CredalSet cs =
      reduce_to_extremes(ensemble, options.dup_tol, options.hull_tol);
  const auto dec = entropy_decomposition(cs);
  const int k = cs.k();

  Decision out;
  out.decomposition = dec;
  out.m_extremes = cs.size();
  out.slack = std::log2(static_cast<double>(k)) - dec.tu_upper_loose;
  // A single degenerate extreme gives u[TU] = 0; the ratio is then taken
  // to be 1, the precise-case (pure aleatoric) limit.
  out.au_tu_ratio =
      dec.tu_upper_loose == 0.0 ? 1.0 : dec.au / dec.tu_upper_loose;

  if (out.slack >= epsilon) {
    out.kind = DecisionKind::predict;
    out.region = (options.exact_ihdr && k <= 20) ? ihdr_exact(cs, gamma)
                                                 : ihdr_greedy(cs, gamma);
  } else if (out.au_tu_ratio >= 0.5) {
    out.kind = DecisionKind::abstain_aleatoric;
  } else {
    out.kind = DecisionKind::abstain_epistemic;
  }
  return out;
}

std::vector<int> cdec_point_prediction(const CredalSet &cs) {
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  const auto lows = singleton_lowers(cs);
  const double top = *std::max_element(lows.begin(), lows.end());
  std::vector<int> argmax;
  for (int j = 0; j < cs.k(); ++j)
    if (lows[j] == top) argmax.push_back(j);
  return argmax;
}

}  // namespace cdec
