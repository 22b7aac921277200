#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fbmlab::harness {

struct OutputRecord {
  std::string file; // relative to the run directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct StageTime {
  std::string name;
  double seconds = 0;
};

struct Headline {
  std::string label;
  std::string status = "ok";
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
};

struct RunManifest {
  std::string command;
  std::string version;
  std::string timestamp;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  std::vector<OutputRecord> outputs;
  std::vector<StageTime> stages;
  Headline headline;
};

std::string manifest_to_json(const RunManifest &m);
RunManifest manifest_from_json(const std::string &text);
RunManifest read_manifest(const std::string &path);
void write_manifest(const RunManifest &m, const std::string &path);

// Recomputes every output digest relative to run_dir; returns the files
// whose digest does not match.
std::vector<std::string> verify_manifest(const RunManifest &m,
                                         const std::string &run_dir);

std::string utc_timestamp();

} // namespace fbmlab::harness
