// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cdec/pipeline.hpp"
#include "cdec/interval.hpp"
#include "oracles.hpp"

using namespace cdec;

namespace {

int g_failures = 0;

void criterion(int number, bool pass, const std::string &detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", number,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

PredictiveEnsemble make_ensemble(const oracle::Matrix &rows) {
  PredictiveEnsemble e;
  for (const auto &row : rows) e.members.push_back(validate_pmf(row));
  return e;
}

oracle::Matrix extremes_of(const CredalSet &cs) {
  oracle::Matrix rows;
  for (const auto &p : cs.extremes) rows.push_back(p.probs());
  return rows;
}

const oracle::Matrix kTable1 = {
    {0.7, 0.25, 0.03, 0.01, 0.01},
    {0.6, 0.2, 0.1, 0.05, 0.05},
    {0.5, 0.3, 0.15, 0.025, 0.025},
};

char buffer[512];

// --- criteria -------------------------------------------------------------

void criterion_1_worked_example() {
  const auto p = validate_pmf({0.7, 0.2, 0.08, 0.02});
  const auto warm = optimal_d(p, 0.05);

  const auto start = std::chrono::steady_clock::now();
  const int reps = 1000;
  double sink = 0.0;
  for (int i = 0; i < reps; ++i) sink += optimal_d(p, 0.05).d_star;
  const double ms_per_call = seconds_since(start) * 1000.0 / reps;

  const bool region_ok = warm.region == std::vector<int>{0, 1, 2};
  const bool xi_ok = std::abs(warm.xi - 0.02) <= 1e-12;
  const bool d_ok = std::abs(warm.d_star - 30.0 / 19.0) <= 1e-9;
  const bool time_ok = ms_per_call < 1.0;
  std::snprintf(buffer, sizeof buffer,
                "worked inflation solve: region {1,2,3}, xi = %.6f, "
                "d* = %.9f, %.4f ms/call (sink %.0f)",
                warm.xi, warm.d_star, ms_per_call, sink);
  criterion(1, region_ok && xi_ok && d_ok && time_ok, buffer);
}

void criterion_2_interval_bounds() {
  const IntervalModel model{validate_pmf({0.7, 0.2, 0.08, 0.02}), 1.58};
  const auto first = interval_lower_upper(model, {0});
  const auto last = interval_lower_upper(model, {3});
  const bool ok = std::abs(first.lower - 0.4749) <= 5e-4 &&
                  std::abs(first.upper - 0.8575) <= 5e-4 &&
                  std::abs(last.lower - 0.0078) <= 5e-4 &&
                  std::abs(last.upper - 0.05) <= 5e-4;
  std::snprintf(buffer, sizeof buffer,
                "interval bounds: P({1}) in [%.4f, %.4f], P({4}) in "
                "[%.4f, %.4f]",
                first.lower, first.upper, last.lower, last.upper);
  criterion(2, ok, buffer);
}

void criterion_3_table1_ihdr() {
  const auto cs = reduce_to_extremes(make_ensemble(kTable1));
  const auto greedy = ihdr_greedy(cs, 0.1);
  const auto exact = ihdr_exact(cs, 0.1);
  const std::vector<int> expected{0, 1, 2};
  const bool ok = greedy.labels == expected && exact.labels == expected &&
                  std::abs(greedy.achieved_lower_prob - 0.9) <= 1e-12 &&
                  std::abs(exact.achieved_lower_prob - 0.9) <= 1e-12;
  std::snprintf(buffer, sizeof buffer,
                "Table 1 at gamma 0.1: greedy size %d @ %.12f, exact size "
                "%d @ %.12f",
                greedy.size(), greedy.achieved_lower_prob, exact.size(),
                exact.achieved_lower_prob);
  criterion(3, ok, buffer);
}

void criterion_4_entropy_checks() {
  const auto ell = validate_pmf({0.7, 0.2, 0.08, 0.02});
  const double h = entropy(ell);
  std::vector<double> inflated;
  for (double v : ell.probs()) inflated.push_back(2.58 * v);
  const double hm = measure_entropy(inflated);
  const bool ok = std::abs(h - 1.23) <= 0.01 && std::abs(hm + 0.36) <= 0.01;
  std::snprintf(buffer, sizeof buffer,
                "entropies: H = %.4f (1.23 +- 0.01), inflated H = %.4f "
                "(-0.36 +- 0.01)",
                h, hm);
  criterion(4, ok, buffer);
}

void criterion_5_bound_chain() {
  const auto start = std::chrono::steady_clock::now();
  Sampler sampler(1401);
  bool chain_ok = true, grid_ok = true;
  int grid_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(sampler.uniform() * 9);   // 2..10
    const int s = 1 + static_cast<int>(sampler.uniform() * 8);   // 1..8
    oracle::Matrix rows;
    for (int i = 0; i < s; ++i) rows.push_back(oracle::random_pmf(sampler, k));
    const auto cs = reduce_to_extremes(make_ensemble(rows));
    const auto dec = entropy_decomposition(cs, true);
    chain_ok &= dec.au <= dec.tu_lower + 1e-9;
    chain_ok &= dec.tu_lower <= *dec.tu_exact + 1e-9;
    chain_ok &= *dec.tu_exact <= dec.tu_upper_tight + 1e-9;
    chain_ok &= dec.tu_upper_tight <= dec.tu_upper_loose + 1e-9;
    if (cs.size() <= 3 && k <= 4) {
      const double grid = oracle::grid_upper_entropy(extremes_of(cs), 1000);
      grid_ok &= std::abs(*dec.tu_exact - grid) <= 2e-3;
      ++grid_checked;
    }
  }
  const double elapsed = seconds_since(start);
  std::snprintf(buffer, sizeof buffer,
                "bound chain on 1000 ensembles, %d grid-oracle checks, "
                "%.1f s",
                grid_checked, elapsed);
  criterion(5, chain_ok && grid_ok && grid_checked > 0 && elapsed < 60.0,
            buffer);
}

void criterion_6_ihdr_coverage() {
  Sampler sampler(1402);
  bool coverage_ok = true, oracle_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(sampler.uniform() * 11);  // 2..12
    const int s = 1 + static_cast<int>(sampler.uniform() * 6);
    oracle::Matrix rows;
    for (int i = 0; i < s; ++i) rows.push_back(oracle::random_pmf(sampler, k));
    const auto cs = reduce_to_extremes(make_ensemble(rows));
    const double gamma = 0.01 + sampler.uniform() * 0.45;

    const auto greedy = ihdr_greedy(cs, gamma);
    const auto exact = ihdr_exact(cs, gamma);
    coverage_ok &= lower_probability(cs, greedy.labels) >= 1.0 - gamma;
    coverage_ok &= lower_probability(cs, exact.labels) >= 1.0 - gamma;
    oracle_ok &= exact.labels == oracle::min_ihdr(extremes_of(cs), gamma);
  }
  criterion(6, coverage_ok && oracle_ok,
            "IHDR coverage on 1000 instances; exact mode matches the "
            "brute-force minimum-cardinality oracle (k <= 12)");
}

void criterion_7_remark_41() {
  bool ok = true;
  for (int k = 2; k <= 4; ++k) {
    oracle::Matrix rows;
    for (int j = 0; j < k; ++j) {
      std::vector<double> mass(k, 0.01);
      mass[j] = 1.0 - 0.01 * (k - 1);
      rows.push_back(mass);
    }
    const auto e = make_ensemble(rows);
    for (double epsilon : {1e-9, 1e-3, 0.1, 0.5, 1.0, 10.0}) {
      const auto decision = cdec_decide(e, 0.1, epsilon);
      ok &= decision.kind != DecisionKind::predict;
      ok &= decision.m_extremes >= k;
    }
  }
  criterion(7, ok,
            "M >= k forces abstention for every epsilon (k in {2,3,4})");
}

void criterion_8_xi_conservativeness() {
  bool ok = true;
  for (double gamma = 0.01; gamma <= 0.5 + 1e-12; gamma += 0.01) {
    if (xi_of_d(gamma, 0.0) != gamma) ok = false;
    for (int di = 1; di <= 100; ++di)
      if (!(xi_of_d(gamma, static_cast<double>(di)) < gamma)) ok = false;

    if (conservativeness(gamma, 0.0) != 0.0) ok = false;
    double previous = 0.0;
    for (int di = 0; di <= 100; ++di) {
      const double c = conservativeness(gamma, static_cast<double>(di));
      if (c < previous - 1e-15) ok = false;
      previous = c;
    }
    if (std::abs(conservativeness(gamma, 1e6) - gamma) > 1e-4) ok = false;
  }
  criterion(8, ok,
            "xi(d) <= gamma with equality iff d = 0; conservativeness "
            "0 at d = 0, monotone, -> gamma at d = 1e6");
}

void criterion_9_variance_identities() {
  Sampler sampler(1403);
  bool ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(sampler.uniform() * 9);
    const auto p = validate_pmf(oracle::random_pmf(sampler, k));
    const double d = sampler.uniform() * 6.0;
    const auto dec = variance_decomposition(p, d);
    ok &= std::abs(dec.tu - (1.0 + d) * (1.0 + d) * dec.au) <= 1e-9;
    ok &= std::abs(dec.eu - (d * d + 2.0 * d) * dec.au) <= 1e-9;
  }
  const double uniform10 = categorical_variance(uniform_pmf(10));
  ok &= std::abs(uniform10 - 8.25) <= 1e-12;
  std::snprintf(buffer, sizeof buffer,
                "Eq.(8) identities to 1e-9 on 500 draws; uniform k=10 "
                "variance = %.14f",
                uniform10);
  criterion(9, ok, buffer);
}

void criterion_10_metrics() {
  // Perfect separation.
  std::vector<ScoredSample> separated;
  for (int i = 0; i < 20; ++i) {
    ScoredSample s;
    s.id = std::to_string(i);
    s.is_ood = i >= 10;
    s.scores[ScoreKind::eu] = s.is_ood ? 5.0 + i : 0.1 * i;
    separated.push_back(s);
  }
  const auto sep = auroc_auprc(separated, ScoreKind::eu);
  bool ok = sep.first == 1.0 && sep.second == 1.0;

  // All tied.
  std::vector<ScoredSample> tied = separated;
  for (auto &s : tied) s.scores[ScoreKind::eu] = 0.5;
  ok &= auroc_auprc(tied, ScoreKind::eu).first == 0.5;

  // Calibrated stream, seed-pinned.
  Sampler sampler(20240101);
  std::vector<ScoredSample> stream;
  stream.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    ScoredSample s;
    s.id = std::to_string(i);
    const double conf = sampler.uniform();
    s.scores[ScoreKind::conf] = conf;
    s.predicted_label = 0;
    s.true_label = sampler.uniform() < conf ? 0 : 1;
    stream.push_back(std::move(s));
  }
  const double calibrated_ece = ece(stream, 15).ece;
  ok &= calibrated_ece < 0.02;
  std::snprintf(buffer, sizeof buffer,
                "metrics: separated AUROC/AUPRC = 1, tied AUROC = 0.5, "
                "calibrated ECE = %.5f < 0.02",
                calibrated_ece);
  criterion(10, ok, buffer);
}

void criterion_11_desk_scale() {
  const auto start = std::chrono::steady_clock::now();

  SyntheticSpec spec;
  spec.k = 10;
  spec.s = 3;
  spec.n_id = 2000;
  spec.n_ood = 2000;
  spec.concentration_id = 0.15;
  spec.concentration_ood = 0.15;
  spec.spread_id = 400.0;  // members hug the base in distribution
  spec.spread_ood = 2.0;   // OoD spread far below iD spread
  spec.seed = 7;
  const auto corpus = generate_synthetic(spec);

  RunConfig config;
  config.gamma = 0.05;
  config.epsilon = 0.05;
  const auto batch = run_cdec_batch(corpus, config, {});

  double id_size = 0.0, ood_size = 0.0;
  int id_n = 0, ood_n = 0;
  for (const auto &r : batch.records) {
    if (r.kind != "predict") continue;
    if (r.is_ood.value_or(false)) {
      ood_size += static_cast<double>(r.region->size());
      ++ood_n;
    } else {
      id_size += static_cast<double>(r.region->size());
      ++id_n;
    }
  }
  const double mean_id = id_n ? id_size / id_n : 0.0;
  const double mean_ood = ood_n ? ood_size / ood_n : 0.0;

  const auto scored = to_scored_samples(batch.records);
  const double eu_auroc = auroc_auprc(scored, ScoreKind::eu).first;

  // Ensemble-size ablation over nested prefixes of a deeper corpus.
  SyntheticSpec deep = spec;
  deep.s = 10;
  deep.n_id = 500;
  deep.n_ood = 0;
  deep.seed = 11;
  const auto ablation =
      run_ablate(generate_synthetic(deep), config, {1, 3, 5, 7, 10}, {});
  bool eu_monotone = ablation.front().mean_eu == 0.0;
  for (size_t i = 1; i < ablation.size(); ++i)
    eu_monotone &= ablation[i].mean_eu > ablation[i - 1].mean_eu;

  const double elapsed = seconds_since(start);
  const bool ok = eu_auroc > 0.9 && mean_ood > mean_id && id_n > 0 &&
                  ood_n > 0 && eu_monotone && elapsed < 120.0;
  std::snprintf(buffer, sizeof buffer,
                "desk-scale shift study: EU-AUROC = %.4f > 0.9, IHDR size "
                "iD %.3f < OoD %.3f, ablation EU 0 -> %.3f -> %.3f -> %.3f "
                "-> %.3f rising, %.1f s",
                eu_auroc, mean_id, mean_ood, ablation[1].mean_eu,
                ablation[2].mean_eu, ablation[3].mean_eu,
                ablation[4].mean_eu, elapsed);
  criterion(11, ok, buffer);
}

void criterion_12_hartley() {
  Sampler sampler(1404);
  bool ok = true;

  for (int k = 2; k <= 8; ++k) {
    const auto precise = reduce_to_extremes(
        make_ensemble({oracle::random_pmf(sampler, k)}));
    ok &= std::abs(generalized_hartley(precise)) <= 1e-9;

    oracle::Matrix masses;
    for (int j = 0; j < k; ++j) {
      std::vector<double> mass(k, 0.0);
      mass[j] = 1.0;
      masses.push_back(mass);
    }
    const auto vacuous = reduce_to_extremes(make_ensemble(masses));
    ok &= std::abs(generalized_hartley(vacuous) -
                   std::log2(static_cast<double>(k))) <= 1e-9;
  }

  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(sampler.uniform() * 4);  // 2..5
    const int s = 1 + static_cast<int>(sampler.uniform() * 5);
    oracle::Matrix rows;
    for (int i = 0; i < s; ++i) rows.push_back(oracle::random_pmf(sampler, k));
    const auto cs = reduce_to_extremes(make_ensemble(rows));
    ok &= std::abs(generalized_hartley(cs) -
                   oracle::hartley_double_sum(extremes_of(cs))) <= 1e-9;
  }
  criterion(12, ok,
            "generalized Hartley: 0 for precise sets, log2 k for vacuous "
            "sets (k 2..8), double-sum oracle agreement at k <= 5");
}

}  // namespace

int main() {
  criterion_1_worked_example();
  criterion_2_interval_bounds();
  criterion_3_table1_ihdr();
  criterion_4_entropy_checks();
  criterion_5_bound_chain();
  criterion_6_ihdr_coverage();
  criterion_7_remark_41();
  criterion_8_xi_conservativeness();
  criterion_9_variance_identities();
  criterion_10_metrics();
  criterion_11_desk_scale();
  criterion_12_hartley();

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}
