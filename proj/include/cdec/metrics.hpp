#ifndef CDEC_METRICS_HPP_
#define CDEC_METRICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdec/errors.hpp"

namespace cdec {

enum class ScoreKind { au, eu, tu, conf };

std::string score_kind_name(ScoreKind kind);

// One evaluated sample: uncertainty scores plus whatever ground truth and
// decision output is available for it.
struct ScoredSample {
  std::string id;
  std::map<ScoreKind, double> scores;
  bool is_ood = false;
  std::optional<int> true_label;       // 0-based
  std::optional<int> predicted_label;  // 0-based
  std::optional<std::vector<int>> region;
};

struct CalibrationBin {
  double mean_conf = 0.0;
  double empirical_acc = 0.0;
  double weight = 0.0;
};

struct CalibrationReport {
  double ece = 0.0;
  std::vector<CalibrationBin> bins;
  int n_bins = 0;
};

// Expected calibration error over equal-width confidence bins on [0, 1];
// the last bin is right-inclusive so conf = 1 is counted. Every sample
// must carry conf, predicted_label and true_label.
CalibrationReport ece(const std::vector<ScoredSample> &samples, int n_bins);

// AUROC (rank-sum, ties at half credit) and AUPRC (average precision with
// step interpolation) of the given score separating OoD (positive) from
// in-distribution samples. conf scores are negated before ranking.
std::pair<double, double> auroc_auprc(const std::vector<ScoredSample> &samples,
                                      ScoreKind kind);

struct OodReport {
  std::map<ScoreKind, std::pair<double, double>> by_kind;  // (auroc, auprc)
  int n_id = 0;
  int n_ood = 0;
};

struct RegionStats {
  double mean_size = 0.0;
  double coverage = 0.0;
  int n = 0;
};

// Mean region cardinality and the fraction of samples whose true label
// the region contains, over samples carrying both region and label.
RegionStats region_stats(const std::vector<ScoredSample> &samples);

}  // namespace cdec

#endif  // CDEC_METRICS_HPP_
