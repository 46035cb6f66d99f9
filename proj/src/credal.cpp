#include "cdec/credal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace cdec {

CredalSet CredalSet::from_extremes(std::vector<CategoricalPmf> extremes) {
  if (extremes.empty()) throw DimensionMismatch("credal set needs M >= 1");
  const int dim = extremes.front().k();
  for (const auto &p : extremes)
    if (p.k() != dim) throw DimensionMismatch("extremes disagree on k");
  CredalSet cs;
  cs.source_indices.resize(extremes.size());
  std::iota(cs.source_indices.begin(), cs.source_indices.end(), 0);
  cs.extremes = std::move(extremes);
  return cs;
}

namespace detail {

namespace {

// Solves G z = rhs by Cholesky; falls back to a ridged system when the
// Gram matrix is numerically singular.
bool solve_spd(std::vector<double> G, std::vector<double> rhs, int n,
               std::vector<double> &z) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> L(G);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = L[i * n + j];
        for (int t = 0; t < j; ++t) s -= L[i * n + t] * L[j * n + t];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          L[i * n + i] = std::sqrt(s);
        } else {
          L[i * n + j] = s / L[j * n + j];
        }
      }
    }
    if (ok) {
      z.assign(n, 0.0);
      for (int i = 0; i < n; ++i) {
        double s = rhs[i];
        for (int t = 0; t < i; ++t) s -= L[i * n + t] * z[t];
        z[i] = s / L[i * n + i];
      }
      for (int i = n - 1; i >= 0; --i) {
        double s = z[i];
        for (int t = i + 1; t < n; ++t) s -= L[t * n + i] * z[t];
        z[i] = s / L[i * n + i];
      }
      return true;
    }
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += G[i * n + i];
    const double ridge = std::max(1e-12 * trace, 1e-300);
    for (int i = 0; i < n; ++i) G[i * n + i] += ridge;
  }
  return false;
}

// Lawson-Hanson nonnegative least squares for min ||A x - b||, x >= 0.
// A is rows x cols in row-major order. Finite termination; the returned x
// is the global minimizer of this convex problem.
std::vector<double> nnls(const std::vector<double> &A, const std::vector<double> &b,
                         int rows, int cols) {
  std::vector<double> x(cols, 0.0);
  std::vector<bool> passive(cols, false);
  std::vector<double> w(cols), residual(rows);

  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  const double grad_tol = 1e-13 * std::max(scale, 1.0);

  const int max_outer = 3 * cols + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    for (int r = 0; r < rows; ++r) {
      double s = b[r];
      for (int c = 0; c < cols; ++c) s -= A[r * cols + c] * x[c];
      residual[r] = s;
    }
    int best = -1;
    double best_w = grad_tol;
    for (int c = 0; c < cols; ++c) {
      if (passive[c]) continue;
      double s = 0.0;
      for (int r = 0; r < rows; ++r) s += A[r * cols + c] * residual[r];
      w[c] = s;
      if (s > best_w) {
        best_w = s;
        best = c;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      std::vector<int> idx;
      for (int c = 0; c < cols; ++c)
        if (passive[c]) idx.push_back(c);
      const int n = static_cast<int>(idx.size());

      std::vector<double> G(n * n, 0.0), rhs(n, 0.0), z;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int r = 0; r < rows; ++r)
            s += A[r * cols + idx[i]] * A[r * cols + idx[j]];
          G[i * n + j] = G[j * n + i] = s;
        }
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += A[r * cols + idx[i]] * b[r];
        rhs[i] = s;
      }
      if (!solve_spd(std::move(G), std::move(rhs), n, z)) {
        passive[best] = false;
        break;
      }

      bool all_positive = true;
      for (double v : z)
        if (v <= 0.0) all_positive = false;
      if (all_positive) {
        for (int i = 0; i < n; ++i) x[idx[i]] = z[i];
        break;
      }

      double alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (z[i] <= 0.0) {
          const double denom = x[idx[i]] - z[i];
          if (denom > 0.0) alpha = std::min(alpha, x[idx[i]] / denom);
        }
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      for (int i = 0; i < n; ++i) {
        x[idx[i]] += alpha * (z[i] - x[idx[i]]);
        if (x[idx[i]] <= 1e-14 * std::max(scale, 1.0)) {
          x[idx[i]] = 0.0;
          passive[idx[i]] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace

SimplexFit fit_convex_combination(
    const std::vector<const CategoricalPmf *> &basis,
    const CategoricalPmf &target) {
  const int m = static_cast<int>(basis.size());
  if (m == 0)
    return {{}, std::numeric_limits<double>::infinity()};
  const int k = target.k();

  // One extra row enforces sum(beta) = 1; when an exact combination
  // exists the constraint binds to the same accuracy as the fit.
  const double kSumWeight = 16.0;
  const int rows = k + 1;
  std::vector<double> A(rows * m), b(rows);
  for (int j = 0; j < k; ++j) {
    for (int c = 0; c < m; ++c) A[j * m + c] = (*basis[c])[j];
    b[j] = target[j];
  }
  for (int c = 0; c < m; ++c) A[k * m + c] = kSumWeight;
  b[k] = kSumWeight;

  std::vector<double> beta = nnls(A, b, rows, m);
  double total = std::accumulate(beta.begin(), beta.end(), 0.0);
  if (total <= 0.0)
    return {std::move(beta), std::numeric_limits<double>::infinity()};
  for (double &v : beta) v /= total;

  double err = 0.0;
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += beta[c] * (*basis[c])[j];
    err = std::max(err, std::abs(s - target[j]));
  }
  return {std::move(beta), err};
}

}  // namespace detail

namespace {

double max_abs_diff(const CategoricalPmf &a, const CategoricalPmf &b) {
  double d = 0.0;
  for (int j = 0; j < a.k(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

}  // namespace

CredalSet reduce_to_extremes(const PredictiveEnsemble &ensemble,
                             double dup_tol, double hull_tol) {
  ensemble.check();
  if (dup_tol <= 0 || hull_tol <= 0)
    throw Error("reduction tolerances must be positive");
  const auto &members = ensemble.members;
  const int s_count = ensemble.size();

  // Collapse duplicates onto the lowest index.
  std::vector<int> reps;
  for (int i = 0; i < s_count; ++i) {
    bool dup = false;
    for (int r : reps)
      if (max_abs_diff(members[i], members[r]) <= dup_tol) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(i);
  }

  // A member is a vertex iff it cannot be reconstructed from the others.
  std::vector<int> verts;
  for (size_t i = 0; i < reps.size(); ++i) {
    std::vector<const CategoricalPmf *> others;
    for (size_t j = 0; j < reps.size(); ++j)
      if (j != i) others.push_back(&members[reps[j]]);
    const auto fit = detail::fit_convex_combination(others, members[reps[i]]);
    if (fit.max_abs_error > hull_tol) verts.push_back(reps[i]);
  }
  if (verts.empty()) verts.push_back(reps.front());

  // Certify every discarded member against the retained set. A member
  // that does not reconstruct within hull_tol is promoted; this can only
  // happen for near-degenerate geometry where the tolerances disagree.
  std::vector<DiscardCertificate> discards;
  for (bool stable = false; !stable;) {
    stable = true;
    discards.clear();
    std::vector<const CategoricalPmf *> basis;
    for (int v : verts) basis.push_back(&members[v]);
    for (int i = 0; i < s_count; ++i) {
      if (std::find(verts.begin(), verts.end(), i) != verts.end()) continue;
      auto fit = detail::fit_convex_combination(basis, members[i]);
      if (fit.max_abs_error > hull_tol) {
        verts.push_back(i);
        std::sort(verts.begin(), verts.end());
        stable = false;
        break;
      }
      discards.push_back({i, std::move(fit.coefficients), fit.max_abs_error});
    }
  }

  CredalSet cs;
  for (int v : verts) {
    cs.extremes.push_back(members[v]);
    cs.source_indices.push_back(v);
  }
  cs.discards = std::move(discards);
  return cs;
}

namespace {

std::vector<int> checked_subset(const CredalSet &cs,
                                const std::vector<int> &subset) {
  std::vector<int> sorted(subset);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int y : sorted)
    if (y < 0 || y >= cs.k())
      throw LabelOutOfRange("label " + std::to_string(y) +
                            " outside 0.." + std::to_string(cs.k() - 1));
  return sorted;
}

std::vector<int> complement_of(const std::vector<int> &sorted, int k) {
  std::vector<int> comp;
  comp.reserve(k - sorted.size());
  size_t pos = 0;
  for (int y = 0; y < k; ++y) {
    if (pos < sorted.size() && sorted[pos] == y)
      ++pos;
    else
      comp.push_back(y);
  }
  return comp;
}

// Evaluates the smaller side directly and the larger side through the
// complement, so that a set and its complement always add to exactly one
// per extreme.
double subset_mass(const CategoricalPmf &p, const std::vector<int> &subset,
                   const std::vector<int> &complement) {
  if (subset.size() <= complement.size()) {
    double s = 0.0;
    for (int y : subset) s += p[y];
    return s;
  }
  double s = 0.0;
  for (int y : complement) s += p[y];
  return 1.0 - s;
}

}  // namespace

double lower_probability(const CredalSet &cs, const std::vector<int> &subset) {
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  const auto sorted = checked_subset(cs, subset);
  if (sorted.empty()) return 0.0;
  if (static_cast<int>(sorted.size()) == cs.k()) return 1.0;
  const auto comp = complement_of(sorted, cs.k());
  double lo = std::numeric_limits<double>::infinity();
  for (const auto &p : cs.extremes)
    lo = std::min(lo, subset_mass(p, sorted, comp));
  return lo;
}

double upper_probability(const CredalSet &cs, const std::vector<int> &subset) {
  const auto sorted = checked_subset(cs, subset);
  return 1.0 - lower_probability(cs, complement_of(sorted, cs.k()));
}

UncertaintyDecomposition entropy_decomposition(const CredalSet &cs,
                                               bool exact) {
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  std::vector<double> hs;
  hs.reserve(cs.size());
  for (const auto &p : cs.extremes) hs.push_back(entropy(p));
  const double h_min = *std::min_element(hs.begin(), hs.end());
  const double h_max = *std::max_element(hs.begin(), hs.end());

  double pow_sum = 0.0;
  for (double h : hs) pow_sum += std::exp2(h - h_max);

  UncertaintyDecomposition dec;
  dec.au = h_min;
  dec.tu_lower = h_max;
  dec.tu_upper_tight = h_max + std::log2(pow_sum);
  dec.tu_upper_loose = h_max + std::log2(static_cast<double>(cs.size()));
  dec.eu_lower = std::max(0.0, dec.tu_lower - dec.au);
  dec.eu_upper = dec.tu_upper_loose - dec.au;
  if (exact) dec.tu_exact = exact_upper_entropy(cs);
  return dec;
}

namespace {

constexpr double kLog2E = 1.4426950408889634;  // 1/ln 2

double mixture_entropy(const std::vector<double> &q) {
  double h = 0.0;
  for (double v : q)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace

double exact_upper_entropy(const CredalSet &cs, double tol, int max_iters) {
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  if (tol <= 0) throw Error("tolerance must be positive");
  const int m = cs.size();
  const int k = cs.k();

  std::vector<double> vertex_h(m);
  for (int s = 0; s < m; ++s) vertex_h[s] = entropy(cs.extremes[s]);
  double best = *std::max_element(vertex_h.begin(), vertex_h.end());
  if (m == 1) return best;

  std::vector<double> beta(m, 1.0 / m), q(k), grad(m);
  const auto mix = [&](const std::vector<double> &w, std::vector<double> &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int s = 0; s < m; ++s)
      for (int j = 0; j < k; ++j) out[j] += w[s] * cs.extremes[s][j];
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    mix(beta, q);
    // d/dbeta_s H(q) = -sum_j P_sj (log2 q_j + 1/ln 2); a floor keeps the
    // gradient finite when moving mass toward a dead coordinate.
    for (int s = 0; s < m; ++s) {
      double g = 0.0;
      for (int j = 0; j < k; ++j) {
        const double pj = cs.extremes[s][j];
        if (pj > 0.0) g -= pj * (std::log2(std::max(q[j], 1e-300)) + kLog2E);
      }
      grad[s] = g;
    }
    const double grad_dot_beta =
        std::inner_product(grad.begin(), grad.end(), beta.begin(), 0.0);

    int fw = static_cast<int>(
        std::max_element(grad.begin(), grad.end()) - grad.begin());
    const double gap = grad[fw] - grad_dot_beta;
    if (gap <= tol) return std::max(best, mixture_entropy(q));

    int away = -1;
    double away_grad = std::numeric_limits<double>::infinity();
    for (int s = 0; s < m; ++s)
      if (beta[s] > 0.0 && grad[s] < away_grad) {
        away_grad = grad[s];
        away = s;
      }

    // Choose the better aligned of the Frank-Wolfe and away directions.
    std::vector<double> dir(m);
    double step_max;
    if (grad[fw] - grad_dot_beta >= grad_dot_beta - away_grad || away < 0) {
      for (int s = 0; s < m; ++s) dir[s] = (s == fw ? 1.0 : 0.0) - beta[s];
      step_max = 1.0;
    } else {
      for (int s = 0; s < m; ++s) dir[s] = beta[s] - (s == away ? 1.0 : 0.0);
      step_max = beta[away] >= 1.0 ? 1e18 : beta[away] / (1.0 - beta[away]);
    }

    // The objective is concave along the ray, so bisect on the sign of the
    // directional derivative.
    std::vector<double> dq(k, 0.0);
    for (int s = 0; s < m; ++s)
      for (int j = 0; j < k; ++j) dq[j] += dir[s] * cs.extremes[s][j];
    const auto dderiv = [&](double t) {
      double d = 0.0;
      for (int j = 0; j < k; ++j) {
        const double v = q[j] + t * dq[j];
        if (dq[j] != 0.0)
          d -= dq[j] * (std::log2(std::max(v, 1e-300)) + kLog2E);
      }
      return d;
    };
    double lo = 0.0, hi = step_max;
    if (dderiv(hi) >= 0.0) {
      lo = hi;
    } else {
      for (int it2 = 0; it2 < 80 && hi - lo > 1e-16 * (1.0 + hi); ++it2) {
        const double mid = 0.5 * (lo + hi);
        if (dderiv(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
    }
    const double step = lo;
    if (step <= 0.0) return std::max(best, mixture_entropy(q));

    double total = 0.0;
    for (int s = 0; s < m; ++s) {
      beta[s] = std::max(0.0, beta[s] + step * dir[s]);
      total += beta[s];
    }
    for (int s = 0; s < m; ++s) beta[s] /= total;
  }

  mix(beta, q);
  // Re-certify after the iteration budget; fail only if the gap is still open.
  for (int s = 0; s < m; ++s) {
    double g = 0.0;
    for (int j = 0; j < k; ++j) {
      const double pj = cs.extremes[s][j];
      if (pj > 0.0) g -= pj * (std::log2(std::max(q[j], 1e-300)) + kLog2E);
    }
    grad[s] = g;
  }
  const double gap =
      *std::max_element(grad.begin(), grad.end()) -
      std::inner_product(grad.begin(), grad.end(), beta.begin(), 0.0);
  if (gap > tol)
    throw ConvergenceFailure("upper entropy gap " + std::to_string(gap) +
                             " above tolerance after " +
                             std::to_string(max_iters) + " iterations");
  return std::max(best, mixture_entropy(q));
}

double generalized_hartley(const CredalSet &cs) {
  if (cs.size() < 1) throw DimensionMismatch("empty credal set");
  const int k = cs.k();
  if (k > 12)
    throw TooManyClasses("generalized Hartley enumerates 2^k subsets; k = " +
                         std::to_string(k) + " > 12");
  const std::uint32_t n_masks = 1u << k;

  // lower[mask] = min over extremes of the mask's probability mass.
  std::vector<double> lower(n_masks, std::numeric_limits<double>::infinity());
  std::vector<double> mass(n_masks);
  for (const auto &p : cs.extremes) {
    mass[0] = 0.0;
    for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
      const int bit = std::countr_zero(mask);
      mass[mask] = mass[mask & (mask - 1)] + p[bit];
    }
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
      lower[mask] = std::min(lower[mask], mass[mask]);
  }

  // In-place Moebius transform over the subset lattice.
  std::vector<double> moebius(lower);
  for (int bit = 0; bit < k; ++bit)
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
      if (mask & (1u << bit)) moebius[mask] -= moebius[mask ^ (1u << bit)];

  double gh = 0.0;
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    const int size = std::popcount(mask);
    if (size >= 2) gh += std::log2(static_cast<double>(size)) * moebius[mask];
  }
  return gh;
}

}  // namespace cdec
