#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fbmlab/harness/config.hpp"
#include "fbmlab/harness/csv.hpp"
#include "fbmlab/harness/manifest.hpp"

namespace fbmlab::harness {

// Executes the configured command, writes its CSV files, optional SVG plots
// and manifest.json into cfg.out_dir, and returns the manifest. Progress is
// one line per stage on `log`.
RunManifest run(const ExperimentConfig &cfg, std::ostream &log);

struct ReportRow {
  std::string manifest;
  std::string command;
  std::string seeds;
  std::string key_params;
  std::string label;
  std::string status;
  double estimate;
  double ci_lo;
  double ci_hi;
  // "ok", or "changed:" followed by the outputs whose digest no longer matches.
  std::string outputs = "ok";
};

CsvTable report_csv(const std::vector<ReportRow> &rows);

// One row per manifest, with output digests checked against the files next
// to the manifest. Writes report.csv into out_dir when it is nonempty
// and prints an aligned table to `out`. Throws fbmlab::Error naming a missing
// or corrupt manifest.
std::vector<ReportRow> report(const std::vector<std::string> &manifests,
                              const std::string &out_dir, std::ostream &out);

} // namespace fbmlab::harness
