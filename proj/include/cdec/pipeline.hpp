#ifndef CDEC_PIPELINE_HPP_
#define CDEC_PIPELINE_HPP_

#include <string>
#include <vector>

#include "cdec/data_io.hpp"
#include "cdec/metrics.hpp"

namespace cdec {

// Per-sample errors are recorded, not fatal, unless strict is set. Work is
// distributed over min(jobs, n) workers; output order always matches
// input order.
struct BatchOptions {
  int jobs = 1;
  bool strict = false;
  bool collapse_ensemble = false;  // idec: keep the first member of S > 1 rows
};

struct BatchResult {
  std::vector<ReportRecord> records;
  ReportSummary summary;
  bool had_data_error = false;
  bool had_numerical_error = false;
};

BatchResult run_cdec_batch(const std::vector<SampleRecord> &samples,
                           const RunConfig &config,
                           const BatchOptions &options = {});

BatchResult run_idec_batch(const std::vector<SampleRecord> &samples,
                           const RunConfig &config,
                           const BatchOptions &options = {});

// Conversion of report rows into metric inputs; rows flagged as errors
// are dropped.
std::vector<ScoredSample> to_scored_samples(
    const std::vector<ReportRecord> &records);

struct MetricsResult {
  CalibrationReport calibration;
  OodReport ood;
  RegionStats region_id;
  RegionStats region_ood;
  bool has_region_ood = false;
};

MetricsResult compute_metrics(const std::vector<ScoredSample> &samples,
                              const RunConfig &config);

struct AblateRow {
  int s = 0;
  int n = 0;
  int n_predict = 0;
  int n_errors = 0;
  double predict_rate = 0.0;
  double mean_region_size = 0.0;  // over predictions
  double coverage = 0.0;          // over predictions with labels
  double mean_au = 0.0;
  double mean_eu = 0.0;
  double mean_tu = 0.0;
};

// Runs the credal rule on nested prefix ensembles of the first s members
// for each s in the grid.
std::vector<AblateRow> run_ablate(const std::vector<SampleRecord> &samples,
                                  const RunConfig &config,
                                  const std::vector<int> &grid,
                                  const BatchOptions &options = {});

void write_metrics(const MetricsResult &metrics, const std::string &path);
void write_ablate(const std::vector<AblateRow> &rows, const std::string &path);

}  // namespace cdec

#endif  // CDEC_PIPELINE_HPP_
