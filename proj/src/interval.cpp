#include "cdec/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cdec {

namespace {

void check_model(const IntervalModel &model) {
  if (!(model.d >= 0.0) || !std::isfinite(model.d))
    throw Error("inflation factor d must be finite and >= 0");
}

std::vector<int> sorted_labels(const std::vector<int> &subset, int k) {
  std::vector<int> sorted(subset);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int y : sorted)
    if (y < 0 || y >= k)
      throw LabelOutOfRange("label " + std::to_string(y) + " outside 0.." +
                            std::to_string(k - 1));
  return sorted;
}

// Labels by descending probability, ties ascending by index.
std::vector<int> density_order(const CategoricalPmf &p) {
  std::vector<int> order(p.k());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return p[a] > p[b]; });
  return order;
}

}  // namespace

IntervalBounds interval_lower_upper(const IntervalModel &model,
                                    const std::vector<int> &subset) {
  check_model(model);
  const int k = model.base.k();
  const auto sorted = sorted_labels(subset, k);
  if (sorted.empty()) return {0.0, 0.0};

  double in_mass = 0.0;
  for (int y : sorted) in_mass += model.base[y];
  double out_mass = 0.0;
  {
    size_t pos = 0;
    for (int y = 0; y < k; ++y) {
      if (pos < sorted.size() && sorted[pos] == y)
        ++pos;
      else
        out_mass += model.base[y];
    }
  }

  // Limiting values when one side carries no mass.
  if (in_mass <= 0.0) return {0.0, 0.0};
  if (out_mass <= 0.0) return {1.0, 1.0};

  const double inflate = 1.0 + model.d;
  IntervalBounds bounds;
  bounds.lower = 1.0 / (1.0 + inflate * out_mass / in_mass);
  bounds.upper = 1.0 / (1.0 + out_mass / (inflate * in_mass));
  return bounds;
}

double xi_of_d(double gamma, double d) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  if (!(d >= 0.0) || !std::isfinite(d))
    throw Error("inflation factor d must be finite and >= 0");
  return gamma / (1.0 + (1.0 - gamma) * d);
}

std::vector<int> precise_hdr(const CategoricalPmf &p, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw Error("xi must lie in [0, 1]");
  const double target = 1.0 - xi;
  const auto order = density_order(p);

  std::vector<int> region;
  double cumulative = 0.0;
  for (int y : order) {
    if (cumulative >= target) break;
    region.push_back(y);
    cumulative += p[y];
  }
  if (region.empty()) region.push_back(order.front());
  std::sort(region.begin(), region.end());
  return region;
}

std::vector<int> augmented_region(const CategoricalPmf &p, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("gamma must lie in [0, 1)");
  std::vector<int> region = precise_hdr(p, gamma);
  double mass = 0.0;
  for (int y : region) mass += p[y];

  if (mass > 1.0 - gamma + 1e-12) return region;
  if (static_cast<int>(region.size()) == p.k()) return region;

  // Mass is exactly at the threshold: add the most probable outside label.
  int best = -1;
  double best_prob = -1.0;
  size_t pos = 0;
  for (int y = 0; y < p.k(); ++y) {
    if (pos < region.size() && region[pos] == y) {
      ++pos;
      continue;
    }
    if (p[y] > best_prob) {
      best_prob = p[y];
      best = y;
    }
  }
  region.push_back(best);
  std::sort(region.begin(), region.end());
  return region;
}

OptimalInflation optimal_d(const CategoricalPmf &p, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must lie in (0, 1)");
  OptimalInflation out;
  out.region = augmented_region(p, gamma);

  // Miscoverage from the excluded labels directly, so that a full-mass
  // region is detected exactly.
  double xi = 0.0;
  {
    size_t pos = 0;
    for (int y = 0; y < p.k(); ++y) {
      if (pos < out.region.size() && out.region[pos] == y)
        ++pos;
      else
        xi += p[y];
    }
  }
  if (xi <= 0.0)
    throw DegenerateCoverage(
        "augmented region carries all probability mass; d* is infinite");

  out.xi = xi;
  out.d_star = std::max(0.0, (gamma - xi) / (xi * (1.0 - gamma)));
  return out;
}

IntervalDecomposition variance_decomposition(const CategoricalPmf &p,
                                             double d) {
  if (!(d >= 0.0) || !std::isfinite(d))
    throw Error("inflation factor d must be finite and >= 0");
  IntervalDecomposition dec;
  dec.au = categorical_variance(p);
  dec.tu = (1.0 + d) * (1.0 + d) * dec.au;
  dec.eu = dec.tu - dec.au;
  dec.d_used = d;
  return dec;
}

IntervalDecision idec_decide(const CategoricalPmf &p, double gamma,
                             double epsilon) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  const double k = static_cast<double>(p.k());
  const double inf = std::numeric_limits<double>::infinity();

  IntervalDecision out;
  OptimalInflation opt;
  try {
    opt = optimal_d(p, gamma);
  } catch (const DegenerateCoverage &) {
    // Algorithm step 5 in the d -> infinity limit: (1+d)^-2 -> 0 < 1/2.
    out.kind = DecisionKind::abstain_epistemic;
    out.decomposition = {categorical_variance(p), inf, inf, inf};
    out.d_star = inf;
    out.xi = 0.0;
    out.slack = -inf;
    out.d_star_infinite = true;
    return out;
  }

  out.d_star = opt.d_star;
  out.xi = opt.xi;
  out.decomposition = variance_decomposition(p, opt.d_star);

  const double inflate_sq = (1.0 + opt.d_star) * (1.0 + opt.d_star);
  const double v_max = inflate_sq * (k + 1.0) * (k - 1.0) / 12.0;
  out.slack = v_max - out.decomposition.tu;

  if (out.slack >= epsilon) {
    out.kind = DecisionKind::predict;
    // The level-xi HDR of the base pmf equals the interval model's
    // region; opt.region is that HDR by construction.
    Ihdr region;
    region.labels = opt.region;
    region.achieved_lower_prob =
        interval_lower_upper({p, opt.d_star}, opt.region).lower;
    region.gamma = gamma;
    region.method = IhdrMethod::exact;
    out.region = std::move(region);
  } else if (1.0 / inflate_sq >= 0.5) {
    out.kind = DecisionKind::abstain_aleatoric;
  } else {
    out.kind = DecisionKind::abstain_epistemic;
  }
  return out;
}

double conservativeness(double gamma, double d) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  if (!(d >= 0.0) || !std::isfinite(d))
    throw Error("inflation factor d must be finite and >= 0");
  const double one_minus = 1.0 - gamma;
  const double value =
      gamma * one_minus * d * (2.0 + d) / (one_minus * (1.0 + d) * (1.0 + d) + gamma);
  return std::max(0.0, value);
}

}  // namespace cdec
