#ifndef CDEC_DATA_IO_HPP_
#define CDEC_DATA_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cdec/core.hpp"

namespace cdec {

// One input sample: either an S x k ensemble of probability rows or an
// S x k matrix of virtual counts, never both. Labels are 1-based in the
// file and 0-based here.
struct SampleRecord {
  std::string id;
  std::vector<CategoricalPmf> ensemble;
  std::vector<VirtualCounts> counts;
  std::optional<int> true_label;
  std::optional<bool> is_ood;

  bool counts_mode() const { return !counts.empty(); }
  int members() const {
    return static_cast<int>(counts_mode() ? counts.size() : ensemble.size());
  }

  // Counts-mode rows are converted through the posterior predictive.
  PredictiveEnsemble to_ensemble() const;
};

// Batch parameters shared by the engines and the CLI.
struct RunConfig {
  double gamma = 0.05;
  double epsilon = 0.5;
  std::string mode = "cdec";  // "cdec" or "idec"
  bool exact_ihdr = false;
  int n_bins = 15;
  double dup_tol = 1e-9;
  double hull_tol = 1e-8;
  double opt_tol = 1e-6;
  double pmf_tol = 1e-9;
  std::uint64_t seed = 0;

  void check() const;  // throws Error on out-of-range values
};

// Parameters of the synthetic ensemble generator. Each sample draws a
// base pmf from Dirichlet(concentration * 1_k) and S members from
// Dirichlet(spread * k * base); smaller spread means more member
// disagreement.
struct SyntheticSpec {
  int k = 10;
  int s = 3;
  int n_id = 100;
  int n_ood = 0;
  double concentration_id = 1.0;
  double concentration_ood = 1.0;
  double spread_id = 100.0;
  double spread_ood = 1.0;
  std::uint64_t seed = 0;

  void check() const;
};

// Line-delimited JSON records. Throws ParseError with the line number on
// malformed JSON, SchemaError naming the offending field, and
// InconsistentDimensions when k changes across the file.
std::vector<SampleRecord> load_samples(const std::string &path,
                                       double pmf_tol = 1e-9);
void write_samples(const std::vector<SampleRecord> &records,
                   const std::string &path);

std::vector<SampleRecord> generate_synthetic(const SyntheticSpec &spec);

// One per-sample decision row in a report file. Fields that do not apply
// to the mode that produced the report stay unset and are omitted on
// disk. Labels are serialized 1-based.
struct ReportRecord {
  std::string id;
  std::string kind;  // predict | abstain_aleatoric | abstain_epistemic | error
  std::optional<std::vector<int>> region;
  std::optional<double> achieved;
  std::optional<double> gamma;
  std::optional<double> au, eu, tu;
  std::optional<double> tu_tight;      // cdec
  std::optional<double> au_tu_ratio;   // cdec
  std::optional<int> m_extremes;       // cdec
  std::optional<double> d_star;        // idec
  std::optional<bool> d_star_infinite; // idec
  std::optional<double> xi;            // idec
  std::optional<double> conservativeness; // idec
  std::optional<double> slack;
  std::optional<double> conf;
  std::optional<int> predicted_label;
  std::optional<int> true_label;
  std::optional<bool> is_ood;
  std::optional<std::string> error;

  bool operator==(const ReportRecord &) const = default;
};

// Batch-level aggregates written as the final "__summary__" record.
struct ReportSummary {
  std::string mode;
  int n = 0;
  int n_predict = 0;
  int n_abstain_aleatoric = 0;
  int n_abstain_epistemic = 0;
  int n_errors = 0;
  std::optional<double> mean_region_size;  // over predictions
  std::optional<double> coverage;          // over predictions with labels
  std::optional<double> mean_au, mean_eu, mean_tu;
  std::optional<double> brier;
  std::vector<std::string> failed_ids;
};

void write_report(const std::vector<ReportRecord> &records,
                  const ReportSummary &summary, const std::string &path);

struct LoadedReport {
  std::vector<ReportRecord> records;
  std::optional<ReportSummary> summary;
};

LoadedReport load_report(const std::string &path);

// Flat key/value JSON object mirroring RunConfig; unknown keys are
// rejected.
RunConfig load_config(const std::string &path);
void write_config(const RunConfig &config, const std::string &path);

}  // namespace cdec

#endif  // CDEC_DATA_IO_HPP_
