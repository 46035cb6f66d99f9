#include "cdec/data_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cdec/sampling.hpp"
#include "json.hpp"

namespace cdec {

using ordered_json = nlohmann::ordered_json;

PredictiveEnsemble SampleRecord::to_ensemble() const {
  PredictiveEnsemble ensemble;
  if (counts_mode()) {
    for (const auto &row : counts)
      ensemble.members.push_back(posterior_predictive(row));
  } else {
    ensemble.members = this->ensemble;
  }
  ensemble.check();
  return ensemble;
}

void RunConfig::check() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (mode != "cdec" && mode != "idec")
    throw Error("mode must be 'cdec' or 'idec'");
  if (n_bins < 1) throw Error("n_bins must be >= 1");
  if (!(dup_tol > 0.0 && hull_tol > 0.0 && opt_tol > 0.0 && pmf_tol > 0.0))
    throw Error("tolerances must be positive");
}

void SyntheticSpec::check() const {
  if (k < 2) throw Error("synthetic spec needs k >= 2");
  if (s < 1) throw Error("synthetic spec needs s >= 1");
  if (n_id < 1) throw Error("synthetic spec needs n_id >= 1");
  if (n_ood < 0) throw Error("synthetic spec needs n_ood >= 0");
  if (!(concentration_id > 0.0 && concentration_ood > 0.0 &&
        spread_id > 0.0 && spread_ood > 0.0))
    throw Error("concentrations and spreads must be positive");
}

namespace {

std::vector<std::vector<double>> parse_matrix(const ordered_json &value,
                                              const std::string &field,
                                              const std::string &id) {
  if (!value.is_array() || value.empty())
    throw SchemaError(field, "record '" + id + "': expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  size_t width = 0;
  for (const auto &row : value) {
    if (!row.is_array() || row.empty())
      throw SchemaError(field, "record '" + id + "': row is not a nonempty array");
    std::vector<double> entries;
    for (const auto &entry : row) {
      if (!entry.is_number())
        throw SchemaError(field, "record '" + id + "': non-numeric entry");
      entries.push_back(entry.get<double>());
    }
    if (width == 0) width = entries.size();
    if (entries.size() != width)
      throw InconsistentDimensions("record '" + id + "': ragged rows in '" +
                                   field + "'");
    rows.push_back(std::move(entries));
  }
  return rows;
}

SampleRecord parse_record(const ordered_json &obj, double pmf_tol,
                          int &file_k) {
  SampleRecord record;
  if (!obj.contains("id") || !obj.at("id").is_string())
    throw SchemaError("id", "every record needs a string id");
  record.id = obj.at("id").get<std::string>();

  const bool has_ensemble = obj.contains("ensemble");
  const bool has_counts = obj.contains("counts");
  if (has_ensemble == has_counts)
    throw SchemaError(has_ensemble ? "ensemble" : "counts",
                      "record '" + record.id +
                          "': exactly one of ensemble/counts must be present");

  int record_k = 0;
  if (has_ensemble) {
    auto rows = parse_matrix(obj.at("ensemble"), "ensemble", record.id);
    record_k = static_cast<int>(rows.front().size());
    for (auto &row : rows) {
      try {
        record.ensemble.push_back(validate_pmf(row, pmf_tol));
      } catch (const Error &e) {
        throw SchemaError("ensemble",
                          "record '" + record.id + "': " + e.what());
      }
    }
  } else {
    auto rows = parse_matrix(obj.at("counts"), "counts", record.id);
    record_k = static_cast<int>(rows.front().size());
    for (auto &row : rows) {
      for (double v : row) {
        if (!std::isfinite(v))
          throw SchemaError("counts", "record '" + record.id +
                                          "': count is not finite");
        if (v < 0.0)
          throw SchemaError("counts",
                            "record '" + record.id + "': negative count");
      }
      record.counts.push_back(VirtualCounts{std::move(row)});
    }
  }
  if (record_k < 2)
    throw SchemaError(has_ensemble ? "ensemble" : "counts",
                      "record '" + record.id + "': needs k >= 2 columns");
  if (file_k == 0) file_k = record_k;
  if (record_k != file_k)
    throw InconsistentDimensions(
        "record '" + record.id + "': k = " + std::to_string(record_k) +
        " differs from earlier records with k = " + std::to_string(file_k));

  if (obj.contains("true_label")) {
    const auto &label = obj.at("true_label");
    if (!label.is_number_integer())
      throw SchemaError("true_label",
                        "record '" + record.id + "': expected an integer");
    const int one_based = label.get<int>();
    if (one_based < 1 || one_based > record_k)
      throw SchemaError("true_label", "record '" + record.id + "': label " +
                                          std::to_string(one_based) +
                                          " outside 1.." +
                                          std::to_string(record_k));
    record.true_label = one_based - 1;
  }
  if (obj.contains("is_ood")) {
    if (!obj.at("is_ood").is_boolean())
      throw SchemaError("is_ood",
                        "record '" + record.id + "': expected a boolean");
    record.is_ood = obj.at("is_ood").get<bool>();
  }
  for (const auto &[key, value] : obj.items()) {
    (void)value;
    if (key != "id" && key != "ensemble" && key != "counts" &&
        key != "true_label" && key != "is_ood")
      throw SchemaError(key, "record '" + record.id + "': unknown field");
  }
  return record;
}

}  // namespace

std::vector<SampleRecord> load_samples(const std::string &path,
                                       double pmf_tol) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<SampleRecord> records;
  std::string line;
  int line_number = 0;
  int file_k = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error &e) {
      throw ParseError(line_number, e.what());
    }
    if (!obj.is_object())
      throw ParseError(line_number, "expected a JSON object");
    records.push_back(parse_record(obj, pmf_tol, file_k));
  }
  return records;
}

void write_samples(const std::vector<SampleRecord> &records,
                   const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto &record : records) {
    ordered_json obj;
    obj["id"] = record.id;
    if (record.counts_mode()) {
      ordered_json rows = ordered_json::array();
      for (const auto &row : record.counts) rows.push_back(row.counts);
      obj["counts"] = std::move(rows);
    } else {
      ordered_json rows = ordered_json::array();
      for (const auto &row : record.ensemble) rows.push_back(row.probs());
      obj["ensemble"] = std::move(rows);
    }
    if (record.true_label) obj["true_label"] = *record.true_label + 1;
    if (record.is_ood) obj["is_ood"] = *record.is_ood;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<SampleRecord> generate_synthetic(const SyntheticSpec &spec) {
  spec.check();
  Sampler sampler(spec.seed);
  std::vector<SampleRecord> records;
  records.reserve(spec.n_id + spec.n_ood);

  const auto draw_population = [&](int n, bool ood, double concentration,
                                   double spread, const std::string &prefix) {
    const std::vector<double> base_alpha(spec.k, concentration);
    for (int i = 0; i < n; ++i) {
      const std::vector<double> base = sampler.dirichlet(base_alpha);
      SampleRecord record;
      record.id = prefix + std::to_string(i);
      record.is_ood = ood;
      std::vector<double> member_alpha(spec.k);
      for (int j = 0; j < spec.k; ++j)
        member_alpha[j] = spread * static_cast<double>(spec.k) * base[j];
      for (int s = 0; s < spec.s; ++s)
        record.ensemble.push_back(
            validate_pmf(sampler.dirichlet(member_alpha)));
      record.true_label = sampler.categorical(base);
      records.push_back(std::move(record));
    }
  };
  draw_population(spec.n_id, false, spec.concentration_id, spec.spread_id,
                  "id-");
  draw_population(spec.n_ood, true, spec.concentration_ood, spec.spread_ood,
                  "ood-");
  return records;
}

namespace {

// Non-finite values have no JSON representation; they stay implicit in
// the flags that accompany them (d_star_infinite).
void set_if_finite(ordered_json &obj, const char *key,
                   const std::optional<double> &value) {
  if (value && std::isfinite(*value)) obj[key] = *value;
}

ordered_json record_to_json(const ReportRecord &r) {
  ordered_json obj;
  obj["id"] = r.id;
  obj["kind"] = r.kind;
  if (r.region) {
    ordered_json labels = ordered_json::array();
    for (int y : *r.region) labels.push_back(y + 1);
    obj["region"] = std::move(labels);
  }
  set_if_finite(obj, "achieved_lower_prob", r.achieved);
  set_if_finite(obj, "gamma", r.gamma);
  set_if_finite(obj, "au", r.au);
  set_if_finite(obj, "eu", r.eu);
  set_if_finite(obj, "tu", r.tu);
  set_if_finite(obj, "tu_tight", r.tu_tight);
  set_if_finite(obj, "au_tu_ratio", r.au_tu_ratio);
  if (r.m_extremes) obj["m_extremes"] = *r.m_extremes;
  set_if_finite(obj, "d_star", r.d_star);
  if (r.d_star_infinite) obj["d_star_infinite"] = *r.d_star_infinite;
  set_if_finite(obj, "xi", r.xi);
  set_if_finite(obj, "conservativeness", r.conservativeness);
  set_if_finite(obj, "slack", r.slack);
  set_if_finite(obj, "conf", r.conf);
  if (r.predicted_label) obj["predicted_label"] = *r.predicted_label + 1;
  if (r.true_label) obj["true_label"] = *r.true_label + 1;
  if (r.is_ood) obj["is_ood"] = *r.is_ood;
  if (r.error) obj["error"] = *r.error;
  return obj;
}

template <typename T>
void read_optional(const ordered_json &obj, const char *key,
                   std::optional<T> &slot) {
  if (obj.contains(key)) slot = obj.at(key).get<T>();
}

ReportRecord record_from_json(const ordered_json &obj) {
  ReportRecord r;
  r.id = obj.at("id").get<std::string>();
  r.kind = obj.value("kind", std::string{});
  if (obj.contains("region")) {
    std::vector<int> labels;
    for (const auto &y : obj.at("region")) labels.push_back(y.get<int>() - 1);
    r.region = std::move(labels);
  }
  read_optional(obj, "achieved_lower_prob", r.achieved);
  read_optional(obj, "gamma", r.gamma);
  read_optional(obj, "au", r.au);
  read_optional(obj, "eu", r.eu);
  read_optional(obj, "tu", r.tu);
  read_optional(obj, "tu_tight", r.tu_tight);
  read_optional(obj, "au_tu_ratio", r.au_tu_ratio);
  read_optional(obj, "m_extremes", r.m_extremes);
  read_optional(obj, "d_star", r.d_star);
  read_optional(obj, "d_star_infinite", r.d_star_infinite);
  read_optional(obj, "xi", r.xi);
  read_optional(obj, "conservativeness", r.conservativeness);
  read_optional(obj, "slack", r.slack);
  read_optional(obj, "conf", r.conf);
  if (obj.contains("predicted_label"))
    r.predicted_label = obj.at("predicted_label").get<int>() - 1;
  if (obj.contains("true_label"))
    r.true_label = obj.at("true_label").get<int>() - 1;
  read_optional(obj, "is_ood", r.is_ood);
  read_optional(obj, "error", r.error);
  return r;
}

ordered_json summary_to_json(const ReportSummary &s) {
  ordered_json obj;
  obj["id"] = "__summary__";
  obj["mode"] = s.mode;
  obj["n"] = s.n;
  obj["n_predict"] = s.n_predict;
  obj["n_abstain_aleatoric"] = s.n_abstain_aleatoric;
  obj["n_abstain_epistemic"] = s.n_abstain_epistemic;
  obj["n_errors"] = s.n_errors;
  const double denom = s.n > 0 ? static_cast<double>(s.n) : 1.0;
  obj["predict_rate"] = s.n_predict / denom;
  obj["abstain_aleatoric_rate"] = s.n_abstain_aleatoric / denom;
  obj["abstain_epistemic_rate"] = s.n_abstain_epistemic / denom;
  if (s.mean_region_size) obj["mean_region_size"] = *s.mean_region_size;
  if (s.coverage) obj["coverage"] = *s.coverage;
  if (s.mean_au) obj["mean_au"] = *s.mean_au;
  if (s.mean_eu) obj["mean_eu"] = *s.mean_eu;
  if (s.mean_tu) obj["mean_tu"] = *s.mean_tu;
  if (s.brier) obj["brier"] = *s.brier;
  obj["failed_ids"] = s.failed_ids;
  return obj;
}

ReportSummary summary_from_json(const ordered_json &obj) {
  ReportSummary s;
  s.mode = obj.value("mode", std::string{});
  s.n = obj.value("n", 0);
  s.n_predict = obj.value("n_predict", 0);
  s.n_abstain_aleatoric = obj.value("n_abstain_aleatoric", 0);
  s.n_abstain_epistemic = obj.value("n_abstain_epistemic", 0);
  s.n_errors = obj.value("n_errors", 0);
  read_optional(obj, "mean_region_size", s.mean_region_size);
  read_optional(obj, "coverage", s.coverage);
  read_optional(obj, "mean_au", s.mean_au);
  read_optional(obj, "mean_eu", s.mean_eu);
  read_optional(obj, "mean_tu", s.mean_tu);
  read_optional(obj, "brier", s.brier);
  if (obj.contains("failed_ids"))
    s.failed_ids = obj.at("failed_ids").get<std::vector<std::string>>();
  return s;
}

}  // namespace

void write_report(const std::vector<ReportRecord> &records,
                  const ReportSummary &summary, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto &record : records) out << record_to_json(record).dump() << '\n';
  out << summary_to_json(summary).dump() << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

LoadedReport load_report(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  LoadedReport report;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error &e) {
      throw ParseError(line_number, e.what());
    }
    if (!obj.is_object() || !obj.contains("id"))
      throw ParseError(line_number, "expected a record object with an id");
    if (obj.at("id").get<std::string>() == "__summary__") {
      report.summary = summary_from_json(obj);
    } else {
      try {
        report.records.push_back(record_from_json(obj));
      } catch (const ordered_json::exception &e) {
        throw ParseError(line_number, e.what());
      }
    }
  }
  return report;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  ordered_json obj;
  try {
    obj = ordered_json::parse(in);
  } catch (const ordered_json::parse_error &e) {
    throw ParseError(1, e.what());
  }
  if (!obj.is_object()) throw ParseError(1, "config must be a JSON object");

  RunConfig config;
  for (const auto &[key, value] : obj.items()) {
    if (key == "gamma") config.gamma = value.get<double>();
    else if (key == "epsilon") config.epsilon = value.get<double>();
    else if (key == "mode") config.mode = value.get<std::string>();
    else if (key == "exact_ihdr") config.exact_ihdr = value.get<bool>();
    else if (key == "n_bins") config.n_bins = value.get<int>();
    else if (key == "dup_tol") config.dup_tol = value.get<double>();
    else if (key == "hull_tol") config.hull_tol = value.get<double>();
    else if (key == "opt_tol") config.opt_tol = value.get<double>();
    else if (key == "pmf_tol") config.pmf_tol = value.get<double>();
    else if (key == "seed") config.seed = value.get<std::uint64_t>();
    else throw SchemaError(key, "unknown config key");
  }
  config.check();
  return config;
}

void write_config(const RunConfig &config, const std::string &path) {
  ordered_json obj;
  obj["gamma"] = config.gamma;
  obj["epsilon"] = config.epsilon;
  obj["mode"] = config.mode;
  obj["exact_ihdr"] = config.exact_ihdr;
  obj["n_bins"] = config.n_bins;
  obj["dup_tol"] = config.dup_tol;
  obj["hull_tol"] = config.hull_tol;
  obj["opt_tol"] = config.opt_tol;
  obj["pmf_tol"] = config.pmf_tol;
  obj["seed"] = config.seed;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << obj.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cdec
