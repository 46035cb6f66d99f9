#include "cdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdec {

std::string score_kind_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::au: return "au";
    case ScoreKind::eu: return "eu";
    case ScoreKind::tu: return "tu";
    case ScoreKind::conf: return "conf";
  }
  return "?";
}

CalibrationReport ece(const std::vector<ScoredSample> &samples, int n_bins) {
  if (n_bins < 1) throw Error("n_bins must be >= 1");
  if (samples.empty()) throw EmptyInput("ece needs at least one sample");

  std::vector<double> conf_sum(n_bins, 0.0), acc_sum(n_bins, 0.0);
  std::vector<int> count(n_bins, 0);
  for (const auto &s : samples) {
    auto it = s.scores.find(ScoreKind::conf);
    if (it == s.scores.end())
      throw MissingField("conf", "ece sample '" + s.id + "'");
    if (!s.predicted_label)
      throw MissingField("predicted_label", "ece sample '" + s.id + "'");
    if (!s.true_label)
      throw MissingField("true_label", "ece sample '" + s.id + "'");
    const double conf = it->second;
    int bin = static_cast<int>(conf * n_bins);
    bin = std::clamp(bin, 0, n_bins - 1);  // conf = 1 lands in the last bin
    conf_sum[bin] += conf;
    acc_sum[bin] += (*s.predicted_label == *s.true_label) ? 1.0 : 0.0;
    ++count[bin];
  }

  CalibrationReport report;
  report.n_bins = n_bins;
  report.bins.resize(n_bins);
  const double n = static_cast<double>(samples.size());
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    auto &bin = report.bins[b];
    bin.mean_conf = conf_sum[b] / count[b];
    bin.empirical_acc = acc_sum[b] / count[b];
    bin.weight = count[b] / n;
    report.ece += bin.weight * std::abs(bin.empirical_acc - bin.mean_conf);
  }
  return report;
}

std::pair<double, double> auroc_auprc(const std::vector<ScoredSample> &samples,
                                      ScoreKind kind) {
  std::vector<std::pair<double, bool>> scored;  // (score, is_ood)
  scored.reserve(samples.size());
  for (const auto &s : samples) {
    auto it = s.scores.find(kind);
    if (it == s.scores.end())
      throw MissingField(score_kind_name(kind),
                         "score for sample '" + s.id + "'");
    // Confidence decreases with uncertainty, so negate it before ranking.
    const double value =
        kind == ScoreKind::conf ? -it->second : it->second;
    scored.emplace_back(value, s.is_ood);
  }
  const auto n_ood = static_cast<double>(
      std::count_if(scored.begin(), scored.end(),
                    [](const auto &p) { return p.second; }));
  const auto n_id = static_cast<double>(scored.size()) - n_ood;
  if (n_ood == 0 || n_id == 0)
    throw SingleClass("need at least one iD and one OoD sample");

  std::sort(scored.begin(), scored.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });

  // AUROC by the Mann-Whitney statistic with midranks for ties.
  double positive_rank_sum = 0.0;
  for (size_t i = 0; i < scored.size();) {
    size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t)
      if (scored[t].second) positive_rank_sum += midrank;
    i = j;
  }
  const double auroc =
      (positive_rank_sum - n_ood * (n_ood + 1.0) / 2.0) / (n_ood * n_id);

  // Average precision: walk thresholds from the highest score down, one
  // step per distinct value.
  double auprc = 0.0;
  double tp = 0.0, fp = 0.0, prev_recall = 0.0;
  for (size_t i = scored.size(); i > 0;) {
    size_t j = i;
    while (j > 0 && scored[j - 1].first == scored[i - 1].first) --j;
    for (size_t t = j; t < i; ++t) {
      if (scored[t].second)
        tp += 1.0;
      else
        fp += 1.0;
    }
    const double recall = tp / n_ood;
    const double precision = tp / (tp + fp);
    auprc += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return {auroc, auprc};
}

RegionStats region_stats(const std::vector<ScoredSample> &samples) {
  RegionStats stats;
  double size_sum = 0.0;
  int covered = 0;
  for (const auto &s : samples) {
    if (!s.region) continue;
    if (!s.true_label)
      throw MissingField("true_label", "region sample '" + s.id + "'");
    ++stats.n;
    size_sum += static_cast<double>(s.region->size());
    if (std::find(s.region->begin(), s.region->end(), *s.true_label) !=
        s.region->end())
      ++covered;
  }
  if (stats.n == 0)
    throw EmptyInput("region_stats needs at least one sample with a region");
  stats.mean_size = size_sum / stats.n;
  stats.coverage = static_cast<double>(covered) / stats.n;
  return stats;
}

}  // namespace cdec
