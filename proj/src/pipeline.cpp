#include "cdec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "cdec/interval.hpp"
#include "json.hpp"

namespace cdec {

namespace {

// Runs worker(i) for every index, distributing over a bounded pool.
// Results land in caller-owned slots, so completion order is irrelevant.
void parallel_for(int n, int jobs, const std::function<void(int)> &worker) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) worker(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) worker(i);
    });
  for (auto &thread : pool) thread.join();
}

int argmax_label(const CategoricalPmf &p) {
  int best = 0;
  for (int j = 1; j < p.k(); ++j)
    if (p[j] > p[best]) best = j;
  return best;
}

double brier_term(const CategoricalPmf &p, int true_label) {
  double sum = 0.0;
  for (int j = 0; j < p.k(); ++j) {
    const double target = j == true_label ? 1.0 : 0.0;
    sum += (p[j] - target) * (p[j] - target);
  }
  return sum;
}

bool is_data_error(const Error &e) {
  return dynamic_cast<const ConvergenceFailure *>(&e) == nullptr &&
         dynamic_cast<const NonFinite *>(&e) == nullptr;
}

// Aggregates rates, region statistics and the Brier score over the
// finished records.
ReportSummary summarize(const std::vector<ReportRecord> &records,
                        const std::string &mode,
                        const std::vector<double> &brier_terms) {
  ReportSummary summary;
  summary.mode = mode;
  summary.n = static_cast<int>(records.size());

  double size_sum = 0.0, au_sum = 0.0, eu_sum = 0.0, tu_sum = 0.0;
  int covered = 0, with_label = 0, decomposed = 0;
  for (const auto &r : records) {
    if (r.kind == "predict") {
      ++summary.n_predict;
      if (r.region) {
        size_sum += static_cast<double>(r.region->size());
        if (r.true_label) {
          ++with_label;
          if (std::find(r.region->begin(), r.region->end(), *r.true_label) !=
              r.region->end())
            ++covered;
        }
      }
    } else if (r.kind == "abstain_aleatoric") {
      ++summary.n_abstain_aleatoric;
    } else if (r.kind == "abstain_epistemic") {
      ++summary.n_abstain_epistemic;
    } else {
      ++summary.n_errors;
      summary.failed_ids.push_back(r.id);
    }
    if (r.au && r.eu && r.tu && std::isfinite(*r.eu) && std::isfinite(*r.tu)) {
      au_sum += *r.au;
      eu_sum += *r.eu;
      tu_sum += *r.tu;
      ++decomposed;
    }
  }
  if (summary.n_predict > 0)
    summary.mean_region_size = size_sum / summary.n_predict;
  if (with_label > 0)
    summary.coverage = static_cast<double>(covered) / with_label;
  if (decomposed > 0) {
    summary.mean_au = au_sum / decomposed;
    summary.mean_eu = eu_sum / decomposed;
    summary.mean_tu = tu_sum / decomposed;
  }
  if (!brier_terms.empty()) {
    double total = 0.0;
    for (double term : brier_terms) total += term;
    summary.brier = total / static_cast<double>(brier_terms.size());
  }
  return summary;
}

struct PerSample {
  ReportRecord record;
  std::optional<double> brier;
  bool data_error = false;
  bool numerical_error = false;
};

BatchResult finish_batch(std::vector<PerSample> &&outcomes,
                         const std::string &mode, bool strict) {
  BatchResult result;
  std::vector<double> brier_terms;
  for (auto &outcome : outcomes) {
    result.had_data_error |= outcome.data_error;
    result.had_numerical_error |= outcome.numerical_error;
    if (outcome.brier) brier_terms.push_back(*outcome.brier);
    result.records.push_back(std::move(outcome.record));
    if (strict && (outcome.data_error || outcome.numerical_error)) break;
  }
  result.summary = summarize(result.records, mode, brier_terms);
  return result;
}

}  // namespace

BatchResult run_cdec_batch(const std::vector<SampleRecord> &samples,
                           const RunConfig &config,
                           const BatchOptions &options) {
  config.check();
  CdecOptions engine;
  engine.dup_tol = config.dup_tol;
  engine.hull_tol = config.hull_tol;
  engine.exact_ihdr = config.exact_ihdr;

  const int n = static_cast<int>(samples.size());
  std::vector<PerSample> outcomes(n);
  parallel_for(n, options.jobs, [&](int i) {
    const auto &sample = samples[i];
    auto &out = outcomes[i];
    out.record.id = sample.id;
    out.record.true_label = sample.true_label;
    out.record.is_ood = sample.is_ood;
    try {
      const PredictiveEnsemble ensemble = sample.to_ensemble();
      const CategoricalPmf mean = mean_pmf(ensemble);
      const Decision decision =
          cdec_decide(ensemble, config.gamma, config.epsilon, engine);

      auto &r = out.record;
      switch (decision.kind) {
        case DecisionKind::predict: r.kind = "predict"; break;
        case DecisionKind::abstain_aleatoric: r.kind = "abstain_aleatoric"; break;
        case DecisionKind::abstain_epistemic: r.kind = "abstain_epistemic"; break;
      }
      if (decision.region) {
        r.region = decision.region->labels;
        r.achieved = decision.region->achieved_lower_prob;
      }
      r.gamma = config.gamma;
      r.au = decision.decomposition.au;
      r.eu = decision.decomposition.eu_upper;
      r.tu = decision.decomposition.tu_upper_loose;
      r.tu_tight = decision.decomposition.tu_upper_tight;
      r.au_tu_ratio = decision.au_tu_ratio;
      r.m_extremes = decision.m_extremes;
      r.slack = decision.slack;
      r.conf = mean[argmax_label(mean)];
      r.predicted_label = argmax_label(mean);
      if (sample.true_label) out.brier = brier_term(mean, *sample.true_label);
    } catch (const Error &e) {
      out.record.kind = "error";
      out.record.error = std::string(e.what());
      out.data_error = is_data_error(e);
      out.numerical_error = !out.data_error;
    }
  });
  return finish_batch(std::move(outcomes), "cdec", options.strict);
}

BatchResult run_idec_batch(const std::vector<SampleRecord> &samples,
                           const RunConfig &config,
                           const BatchOptions &options) {
  config.check();
  const int n = static_cast<int>(samples.size());
  std::vector<PerSample> outcomes(n);
  parallel_for(n, options.jobs, [&](int i) {
    const auto &sample = samples[i];
    auto &out = outcomes[i];
    out.record.id = sample.id;
    out.record.true_label = sample.true_label;
    out.record.is_ood = sample.is_ood;
    try {
      if (sample.members() > 1 && !options.collapse_ensemble)
        throw ShapeError("record '" + sample.id + "' has S = " +
                         std::to_string(sample.members()) +
                         " members; IDEC expects S = 1 "
                         "(pass --collapse-ensemble to keep the first)");
      CategoricalPmf pmf;
      if (sample.counts_mode())
        pmf = posterior_predictive(sample.counts.front());
      else
        pmf = sample.ensemble.front();

      const IntervalDecision decision =
          idec_decide(pmf, config.gamma, config.epsilon);
      auto &r = out.record;
      switch (decision.kind) {
        case DecisionKind::predict: r.kind = "predict"; break;
        case DecisionKind::abstain_aleatoric: r.kind = "abstain_aleatoric"; break;
        case DecisionKind::abstain_epistemic: r.kind = "abstain_epistemic"; break;
      }
      if (decision.region) {
        r.region = decision.region->labels;
        r.achieved = decision.region->achieved_lower_prob;
      }
      r.gamma = config.gamma;
      r.au = decision.decomposition.au;
      r.eu = decision.decomposition.eu;
      r.tu = decision.decomposition.tu;
      // An infinite d* is reported through the flag, not as a number.
      r.d_star_infinite = decision.d_star_infinite;
      if (!decision.d_star_infinite) {
        r.d_star = decision.d_star;
        r.conservativeness = conservativeness(config.gamma, decision.d_star);
      }
      r.xi = decision.xi;
      r.slack = decision.slack;
      r.conf = pmf[argmax_label(pmf)];
      r.predicted_label = argmax_label(pmf);
      if (sample.true_label) out.brier = brier_term(pmf, *sample.true_label);
    } catch (const Error &e) {
      out.record.kind = "error";
      out.record.error = std::string(e.what());
      out.data_error = is_data_error(e);
      out.numerical_error = !out.data_error;
    }
  });
  return finish_batch(std::move(outcomes), "idec", options.strict);
}

std::vector<ScoredSample> to_scored_samples(
    const std::vector<ReportRecord> &records) {
  std::vector<ScoredSample> samples;
  for (const auto &r : records) {
    if (r.error) continue;
    ScoredSample s;
    s.id = r.id;
    if (r.au) s.scores[ScoreKind::au] = *r.au;
    if (r.eu && std::isfinite(*r.eu)) s.scores[ScoreKind::eu] = *r.eu;
    if (r.tu && std::isfinite(*r.tu)) s.scores[ScoreKind::tu] = *r.tu;
    if (r.conf) s.scores[ScoreKind::conf] = *r.conf;
    s.is_ood = r.is_ood.value_or(false);
    s.true_label = r.true_label;
    s.predicted_label = r.predicted_label;
    if (r.region) s.region = r.region;
    samples.push_back(std::move(s));
  }
  return samples;
}

MetricsResult compute_metrics(const std::vector<ScoredSample> &samples,
                              const RunConfig &config) {
  MetricsResult result;
  result.calibration = ece(samples, config.n_bins);

  for (ScoreKind kind :
       {ScoreKind::au, ScoreKind::eu, ScoreKind::tu, ScoreKind::conf})
    result.ood.by_kind[kind] = auroc_auprc(samples, kind);
  for (const auto &s : samples)
    (s.is_ood ? result.ood.n_ood : result.ood.n_id)++;

  std::vector<ScoredSample> in_dist, out_dist;
  for (const auto &s : samples) (s.is_ood ? out_dist : in_dist).push_back(s);
  result.region_id = region_stats(in_dist);
  const bool any_ood_region =
      std::any_of(out_dist.begin(), out_dist.end(),
                  [](const ScoredSample &s) { return s.region.has_value(); });
  if (any_ood_region) {
    result.region_ood = region_stats(out_dist);
    result.has_region_ood = true;
  }
  return result;
}

std::vector<AblateRow> run_ablate(const std::vector<SampleRecord> &samples,
                                  const RunConfig &config,
                                  const std::vector<int> &grid,
                                  const BatchOptions &options) {
  if (grid.empty()) throw Error("ablation grid must not be empty");
  std::vector<AblateRow> rows;
  for (int s : grid) {
    if (s < 1) throw Error("ablation grid entries must be >= 1");
    std::vector<SampleRecord> prefixed;
    prefixed.reserve(samples.size());
    for (const auto &sample : samples) {
      if (sample.members() < s)
        throw ShapeError("record '" + sample.id + "' has only " +
                         std::to_string(sample.members()) +
                         " members; ablation step needs S = " +
                         std::to_string(s));
      SampleRecord cut = sample;
      if (cut.counts_mode())
        cut.counts.resize(s);
      else
        cut.ensemble.resize(s);
      prefixed.push_back(std::move(cut));
    }

    const BatchResult batch = run_cdec_batch(prefixed, config, options);
    AblateRow row;
    row.s = s;
    row.n = batch.summary.n;
    row.n_predict = batch.summary.n_predict;
    row.n_errors = batch.summary.n_errors;
    row.predict_rate =
        batch.summary.n > 0
            ? static_cast<double>(batch.summary.n_predict) / batch.summary.n
            : 0.0;
    row.mean_region_size = batch.summary.mean_region_size.value_or(0.0);
    row.coverage = batch.summary.coverage.value_or(0.0);
    row.mean_au = batch.summary.mean_au.value_or(0.0);
    row.mean_eu = batch.summary.mean_eu.value_or(0.0);
    row.mean_tu = batch.summary.mean_tu.value_or(0.0);
    rows.push_back(row);
  }
  return rows;
}

void write_metrics(const MetricsResult &metrics, const std::string &path) {
  nlohmann::ordered_json obj;
  obj["id"] = "__metrics__";
  obj["ece"] = metrics.calibration.ece;
  obj["n_bins"] = metrics.calibration.n_bins;
  nlohmann::ordered_json ood;
  for (const auto &[kind, value] : metrics.ood.by_kind) {
    ood[score_kind_name(kind)] = {{"auroc", value.first},
                                  {"auprc", value.second}};
  }
  obj["ood"] = std::move(ood);
  obj["n_id"] = metrics.ood.n_id;
  obj["n_ood"] = metrics.ood.n_ood;
  obj["region_stats_id"] = {{"mean_size", metrics.region_id.mean_size},
                            {"coverage", metrics.region_id.coverage},
                            {"n", metrics.region_id.n}};
  if (metrics.has_region_ood)
    obj["region_stats_ood"] = {{"mean_size", metrics.region_ood.mean_size},
                               {"coverage", metrics.region_ood.coverage},
                               {"n", metrics.region_ood.n}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << obj.dump() << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_ablate(const std::vector<AblateRow> &rows, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto &row : rows) {
    nlohmann::ordered_json obj;
    obj["id"] = "__ablate_s" + std::to_string(row.s) + "__";
    obj["s"] = row.s;
    obj["n"] = row.n;
    obj["n_predict"] = row.n_predict;
    obj["n_errors"] = row.n_errors;
    obj["predict_rate"] = row.predict_rate;
    obj["mean_region_size"] = row.mean_region_size;
    obj["coverage"] = row.coverage;
    obj["mean_au"] = row.mean_au;
    obj["mean_eu"] = row.mean_eu;
    obj["mean_tu"] = row.mean_tu;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cdec
